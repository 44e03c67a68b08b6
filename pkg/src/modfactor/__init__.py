"""Factorization of phi-maps between Hilbert C*-modules over finite-dimensional C*-algebras."""
from .algebra import AlgebraElement, AlgebraSpec, canonical_basis
from .cpgns import GnsData, LinearMap, choi, gns, is_cp, kraus_oracle
from .errors import (
    Inconsistent,
    InternalError,
    InvalidInput,
    ModfactorError,
    NotCP,
    NotFull,
    NotIsometry,
    NotPhiMap,
    NotPositive,
    ParseError,
    WellDefinednessFailure,
    WrongShape,
)
from .factor import (
    Factorization,
    StinespringData,
    cyclicity_check,
    factorize,
    from_factorization,
    infer_phi,
    is_phi_map,
    stinespring,
)
from .generators import (
    make_rng,
    random_cp,
    random_factorization,
    random_module,
    random_operator_phi_map,
    random_phi_map,
)
from .hilbmod import (
    Correspondence,
    ModuleElement,
    ModuleMap,
    PresentedModule,
    embed_free,
    free_module,
    inner_product,
    interior_tensor,
    matrix_module,
    module_dim,
)
from .numerics import NumericConfig

__version__ = "0.1.0"
