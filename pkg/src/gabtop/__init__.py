"""Exact computations with right-ideal filters, rings of quotients,
completions, and the comparison map between the two completion functors."""

__version__ = "0.1.0"

from .rings import (
    Integers,
    IntegersMod,
    UnivariatePoly,
    QuadraticOrder,
    UpperTriangular2,
    Ideal,
    QFMorphism,
    qf_compose,
    ideal_sum,
    ideal_intersect,
    colon_ideal,
    translate_product,
    make_handle,
)
from .homalg import (
    FPModule,
    ModuleMap,
    Tower,
    LimReport,
    Lim1Verdict,
    Indeterminate,
    normal_form,
    hom,
    tensor,
    ext1,
    ext1_via_oracle,
    tower_limits,
    two_term_data,
    char_dual,
    module_census,
    hom_ext_sequence,
    zero_fp,
)
from .topology import (
    AxiomVerdict,
    TopologyBase,
    TOmegaWitness,
    TopologyFamily,
    all_right_ideals,
    check_axioms,
    check_t_omega,
    default_sample,
    same_filter,
    saturate,
    topology_le,
    union_topologies,
)
from .quotients import (
    ColimitDescription,
    FullMatrix2,
    PerfectReport,
    QuotientRing,
    TorsionReport,
    annihilator_preimage,
    check_perfect,
    ring_of_quotients,
    sheafify,
    torsion_submodule,
    u_over_r_tower,
    unit_module_data,
    unit_module_left,
)

__all__ = [
    "Integers",
    "IntegersMod",
    "UnivariatePoly",
    "QuadraticOrder",
    "UpperTriangular2",
    "Ideal",
    "QFMorphism",
    "qf_compose",
    "ideal_sum",
    "ideal_intersect",
    "colon_ideal",
    "translate_product",
    "make_handle",
    "FPModule",
    "ModuleMap",
    "Tower",
    "LimReport",
    "Lim1Verdict",
    "Indeterminate",
    "normal_form",
    "hom",
    "tensor",
    "ext1",
    "ext1_via_oracle",
    "tower_limits",
    "two_term_data",
    "char_dual",
    "module_census",
    "hom_ext_sequence",
    "zero_fp",
    "AxiomVerdict",
    "TopologyBase",
    "TOmegaWitness",
    "TopologyFamily",
    "all_right_ideals",
    "check_axioms",
    "check_t_omega",
    "default_sample",
    "same_filter",
    "saturate",
    "topology_le",
    "union_topologies",
    "ColimitDescription",
    "FullMatrix2",
    "PerfectReport",
    "QuotientRing",
    "TorsionReport",
    "annihilator_preimage",
    "check_perfect",
    "ring_of_quotients",
    "sheafify",
    "torsion_submodule",
    "u_over_r_tower",
    "unit_module_data",
    "unit_module_left",
    "__version__",
]
