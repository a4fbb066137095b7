"""Metric operators and Bogoliubov maps for non-Hermitian su(1,1) Hamiltonians."""

from .core import (CASIMIR, KEYS, CoeffSet, GammaSet, GeneratorIndex, HermiticityDefect,
                   add_casimir, gamma_to_mu, hermiticity_defect, is_exactly_solvable_sl2,
                   mu_to_gamma, normal_order)
from .reps import (HamMatrix, RepKind, TruncatedRep, TwoParticleCoeffSet, assemble,
                   assemble_multiparticle, build_rep, build_tensor_product,
                   commutator_residual, pt_rescale)

__version__ = "0.1.0"
