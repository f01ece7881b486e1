"""JSON wire formats shared by every module and the CLI.

Complex entries travel as [re, im] pairs, matrices row-major, algebras as
block-size lists.  Posets dump as integer node ids plus order pairs [i, j]
meaning node i ≤ node j.
"""

from __future__ import annotations

import numpy as np

from .algebra import Element, FdAlgebra
from .contexts import Context, ContextPoset
from .errors import DomainError
from .maps import (JordanMap, ad_map, compose_maps, direct_sum_map,
                   from_basis_images, identity_map, permute_blocks_map,
                   transpose_map)
from .presheaf import PresheafFragment, PresheafMorphism


def jsonable(value):
    """Recursively convert to plain JSON types; non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return f if np.isfinite(f) else repr(f)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


# ----- algebras and elements ------------------------------------------------

def algebra_to_json(algebra: FdAlgebra) -> dict:
    out = {"blocks": list(algebra.block_dims)}
    if algebra.label:
        out["label"] = algebra.label
    return out


def algebra_from_json(data: dict) -> FdAlgebra:
    if not isinstance(data, dict) or "blocks" not in data:
        raise DomainError('algebra JSON needs a "blocks" list')
    return FdAlgebra(data["blocks"], data.get("label"))


def element_to_json(x: Element) -> dict:
    blocks = []
    for m in x.blocks:
        blocks.append([[[float(v.real), float(v.imag)] for v in row] for row in m])
    return {"blocks": blocks}


def element_from_json(algebra: FdAlgebra, data: dict) -> Element:
    if not isinstance(data, dict) or "blocks" not in data:
        raise DomainError('element JSON needs a "blocks" list')
    mats = []
    for raw in data["blocks"]:
        rows = []
        for row in raw:
            rows.append([complex(entry[0], entry[1]) for entry in row])
        mats.append(np.array(rows, dtype=complex))
    return Element(algebra, mats)


# ----- contexts and posets ---------------------------------------------------

def context_to_json(ctx: Context, include_algebra: bool = True) -> dict:
    out = {"atoms": [element_to_json(p) for p in ctx.atoms]}
    if include_algebra:
        out["algebra"] = algebra_to_json(ctx.parent)
    return out


def context_from_json(algebra: FdAlgebra, data: dict) -> Context:
    from .contexts import context_from_commuting
    if "atoms" in data:
        atoms = [element_from_json(algebra, a) for a in data["atoms"]]
        return Context(algebra, atoms)
    if "generators" in data:
        gens = [element_from_json(algebra, g) for g in data["generators"]]
        return context_from_commuting(algebra, gens)
    raise DomainError('context JSON needs "atoms" or "generators"')


def poset_to_json(poset: ContextPoset) -> dict:
    return {
        "algebra": algebra_to_json(poset.parent),
        "nodes": [dict(id=i, **context_to_json(v, include_algebra=False))
                  for i, v in enumerate(poset.nodes)],
        "order": [[i, j] for (i, j) in poset.pairs()],
    }


# ----- presheaves and morphisms ----------------------------------------------

def presheaf_to_json(frag: PresheafFragment) -> dict:
    nodes = []
    for i, (ctx, spec) in enumerate(zip(frag.base.nodes, frag.spectra)):
        nodes.append({
            "id": i,
            "atoms": [element_to_json(p) for p in ctx.atoms],
            "characters": [{"id": k, "atom": ch.atom_index}
                           for k, ch in enumerate(spec.characters)],
        })
    restrictions = [{"lower": i, "upper": j, "map": list(r)}
                    for (i, j), r in sorted(frag.restrictions.items())]
    return {
        "algebra": algebra_to_json(frag.base.parent),
        "nodes": nodes,
        "order": [[i, j] for (i, j) in frag.base.pairs()],
        "restrictions": restrictions,
    }


def presheaf_morphism_to_json(m: PresheafMorphism) -> dict:
    return {
        "base_map": list(m.base_map.index_map),
        "components": [{"node": v, "map": list(comp)}
                       for v, comp in enumerate(m.components)],
    }


# ----- map descriptors --------------------------------------------------------

def map_from_descriptor(algebra: FdAlgebra, data: dict) -> JordanMap:
    """Build a map from its JSON descriptor.

    Kinds: ad_u, transpose, permute_blocks, matrix, compose (applied first to
    last), plus identity and direct_sum for convenience.
    """
    if not isinstance(data, dict) or "kind" not in data:
        raise DomainError('map JSON needs a "kind"')
    kind = data["kind"]
    if kind == "identity":
        return identity_map(algebra)
    if kind == "ad_u":
        return ad_map(element_from_json(algebra, data["u"]))
    if kind == "transpose":
        return transpose_map(algebra, data.get("blocks"))
    if kind == "permute_blocks":
        return permute_blocks_map(algebra, data["perm"])
    if kind == "matrix":
        codomain = (algebra_from_json(data["codomain"])
                    if "codomain" in data else algebra)
        images = [element_from_json(codomain, img) for img in data["basis_images"]]
        return from_basis_images(algebra, codomain, images)
    if kind == "compose":
        parts = data["of"]
        if not parts:
            raise DomainError("compose needs at least one map")
        current = map_from_descriptor(algebra, parts[0])
        for part in parts[1:]:
            nxt = map_from_descriptor(current.codomain, part)
            current = compose_maps(nxt, current)
        return current
    if kind == "direct_sum":
        parts = data["of"]
        start = 0
        maps = []
        for part in parts:
            nblocks = part.get("num_blocks", 1)
            sub = FdAlgebra(algebra.block_dims[start:start + nblocks])
            maps.append(map_from_descriptor(sub, part))
            start += nblocks
        if start != algebra.num_blocks:
            raise DomainError("direct_sum parts do not cover all blocks")
        return direct_sum_map(*maps)
    raise DomainError(f"unknown map kind {kind!r}")
