"""Contexts, spectral presheaves, and orientations of block algebras.

Represents finite direct sums of complex matrix blocks together with the
structures attached to them — the poset of abelian subalgebras, the spectral
presheaf over its finite fragments, order derivations and their inner flows,
and orientation data — and verifies, at desk scale, that a Jordan *-map is a
genuine isomorphism of algebras exactly when it preserves the orientation in
each of its equivalent guises.
"""

from .algebra import (DEFAULT_TOL, Element, FdAlgebra, HermitianBasis, adjoint,
                      central_mask, central_projections, central_symmetry,
                      commutator, distance, hermitian_eig, isclose,
                      jacobi_eigh, jordan_product, multiply, unitary_exp)
from .contexts import (Context, ContextPoset, GelfandSpectrum, OrderMap,
                       bell_number, conjugate_context, context_from_commuting,
                       diagonal_context, down_closure, gelfand_spectrum,
                       induced_order_map, leq, meet, poset_fragment,
                       restriction, set_partitions, trivial_context)
from .derivations import (DEFAULT_TIMES, DynamicalCorrespondence, InnerFlow,
                          OrderDerivation, check_dc_axioms, dc_from_product,
                          delta, flow, flow_on_contexts, flow_on_presheaf,
                          is_skew, product_from_dc, self_skew_decompose,
                          skew_is_jordan_derivation)
from .errors import (DomainError, FragmentEscapeError, InconsistencyError,
                     NumericError, ResourceLimitError, StructureMismatchError,
                     ToolkitError)
from .maps import (JordanMap, ad_map, compose_maps, diagonal_compression_map,
                   direct_sum_map, from_basis_images, identity_map,
                   permute_blocks_map, summand_projection_map, transpose_map)
from .morphisms import (OrientedMapReport, check_commutator_preservation,
                        check_context_diagram, check_jordan_star,
                        check_orientation_delta, check_orientation_flow,
                        check_presheaf_diagram, classify, default_fragment,
                        image_fragment, theorem_suite)
from .presheaf import (PresheafFragment, PresheafMorphism, build_presheaf,
                       compose, identity_morphism, induced_presheaf_morphism,
                       is_isomorphism, pullback)

__version__ = "0.1.0"
