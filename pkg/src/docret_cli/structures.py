"""Named document-listing structures: what each one needs and how it answers."""
from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

from .corpus import Collection
from .doclist import (
    ListResult,
    Scratch,
    TopkHit,
    list_brute_d,
    list_brute_l,
    list_ilcp_d,
    list_ilcp_l,
    list_ilcp_runs,
    list_mut,
    list_sada_d,
    list_sada_l,
    topk_brute_d,
    topk_brute_l,
)
from .errors import InvalidParams
from .pdl import DEFAULT_BLOCK_SIZE, DEFAULT_STORING_FACTOR, build_pdl, pdl_list, pdl_topk
from .rmq import DEFAULT_RMQ_BLOCK, build_rmq
from .storage import IndexBundle, SectionInfo, rmq_source
from .suffixes import build_suffix_index

# every structure answers find() from the text and the suffix array
BASE_SECTIONS = (("TEXT", ""), ("SA  ", ""))

SECTION_OF_ARRAY = {"da": ("DA  ", ""), "c": ("C   ", ""), "ilcp": ("ILCP", ""), "ilcp_runs": ("RUNS", "")}


@dataclass(frozen=True)
class Structure:
    """`build` arrays are construction inputs, `keep` arrays are read by queries."""

    name: str
    build: tuple[str, ...]
    keep: tuple[str, ...]
    rmqs: tuple[str, ...]
    lister: Callable[[IndexBundle, int, int, int, Scratch | None], ListResult]
    topk: Callable[[IndexBundle, int, int, int, Scratch | None], list[TopkHit]] | None = None
    # locates through B instead of reading DA
    uses_bits: bool = False

    @property
    def sections(self) -> tuple[tuple[str, str], ...]:
        found = list(BASE_SECTIONS)
        if self.uses_bits:
            found.append(("BITS", ""))
        found.extend(SECTION_OF_ARRAY[name] for name in self.keep)
        found.extend(("RMQ ", key) for key in self.rmqs)
        return tuple(found)


REGISTRY: dict[str, Structure] = {
    s.name: s
    for s in (
        Structure(
            "brute-l",
            build=(),
            keep=(),
            rmqs=(),
            uses_bits=True,
            lister=lambda b, sp, ep, m, scratch: list_brute_l(b.idx, b.collection, sp, ep),
            topk=lambda b, sp, ep, k, scratch: topk_brute_l(b.idx, b.collection, sp, ep, k),
        ),
        Structure(
            "brute-d",
            build=("da",),
            keep=("da",),
            rmqs=(),
            lister=lambda b, sp, ep, m, scratch: list_brute_d(b.idx, sp, ep),
            topk=lambda b, sp, ep, k, scratch: topk_brute_d(b.idx, sp, ep, k),
        ),
        Structure(
            "mut",
            build=("da", "c"),
            keep=("da", "c"),
            rmqs=("C",),
            lister=lambda b, sp, ep, m, scratch: list_mut(b.idx, sp, ep),
        ),
        Structure(
            "sada-d",
            build=("da", "c"),
            keep=("da",),
            rmqs=("C",),
            lister=lambda b, sp, ep, m, scratch: list_sada_d(b.idx, sp, ep, scratch),
        ),
        Structure(
            "sada-l",
            build=("da", "c"),
            keep=(),
            rmqs=("C",),
            uses_bits=True,
            lister=lambda b, sp, ep, m, scratch: list_sada_l(b.idx, b.collection, sp, ep, scratch),
        ),
        Structure(
            "ilcp-d",
            build=("da", "ilcp"),
            keep=("da", "ilcp"),
            rmqs=("ILCP",),
            lister=lambda b, sp, ep, m, scratch: list_ilcp_d(b.idx, sp, ep, m),
        ),
        Structure(
            "ilcp-l",
            build=("da", "ilcp"),
            keep=("ilcp",),
            rmqs=("ILCP",),
            uses_bits=True,
            lister=lambda b, sp, ep, m, scratch: list_ilcp_l(b.idx, b.collection, sp, ep, m),
        ),
        Structure(
            "ilcp-runs",
            build=("da", "ilcp"),
            keep=("da", "ilcp_runs"),
            rmqs=("RUNS",),
            lister=lambda b, sp, ep, m, scratch: list_ilcp_runs(b.idx, sp, ep, m),
        ),
        Structure(
            "pdl",
            build=("da", "lcp"),
            keep=(),
            rmqs=(),
            uses_bits=True,
            lister=lambda b, sp, ep, m, scratch: pdl_list(b.pdl, b.idx, b.collection, sp, ep),
            topk=lambda b, sp, ep, k, scratch: pdl_topk(b.pdl, b.idx, b.collection, sp, ep, k, scratch),
        ),
    )
}

STRUCTURE_NAMES = tuple(REGISTRY)
TOPK_STRUCTURES = tuple(name for name, s in REGISTRY.items() if s.topk is not None)


def get_structure(name: str) -> Structure:
    try:
        return REGISTRY[name]
    except KeyError:
        raise InvalidParams(f"Unknown structure {name!r}; expected one of {', '.join(STRUCTURE_NAMES)}.") from None


def required_sections(bundle: IndexBundle, name: str) -> list[SectionInfo]:
    """Section table entries a structure's size is charged for."""
    wanted = list(get_structure(name).sections)
    if name == "pdl":
        wanted.extend((tag, "") for tag in ("PDLB", "PDLN", "PDLS", "PDLF"))
        # margins read DA whenever the bundle carries it
        if bundle.idx.da is not None:
            wanted.append(SECTION_OF_ARRAY["da"])
    found = []
    for tag, key in wanted:
        info = bundle.section(tag, key)
        if info is not None:
            found.append(info)
    return found


def build_bundle(
    c: Collection,
    structures: Iterable[str],
    pdl_b: int = DEFAULT_BLOCK_SIZE,
    pdl_beta: float = DEFAULT_STORING_FACTOR,
    pdl_mode: str = "list",
    pdl_compressor: str = "repair",
    rmq_block: int = DEFAULT_RMQ_BLOCK,
) -> IndexBundle:
    """Build SA plus whatever the requested structures need, keeping only what queries read."""
    chosen = [get_structure(name) for name in dict.fromkeys(structures)]
    if not chosen:
        raise InvalidParams("At least one structure must be requested.")
    idx = build_suffix_index(c, arrays={array for s in chosen for array in s.build})
    for key in sorted({key for s in chosen for key in s.rmqs}):
        idx.rmqs[key] = build_rmq(rmq_source(idx, key), block=rmq_block)
    pdl = None
    if "pdl" in {s.name for s in chosen}:
        pdl = build_pdl(idx, c, b=pdl_b, beta=pdl_beta, mode=pdl_mode, compressor=pdl_compressor)

    kept = {array for s in chosen for array in s.keep}
    for array in ("da", "lcp", "ilcp", "ilcp_runs", "c"):
        if array not in kept:
            setattr(idx, array, None)
    return IndexBundle(
        collection=c,
        idx=idx,
        structures=tuple(s.name for s in chosen),
        pdl=pdl,
        meta={"rmq_block": rmq_block},
    )


def list_range(
    bundle: IndexBundle, name: str, sp: int, ep: int, m: int, scratch: Scratch | None = None
) -> ListResult:
    return get_structure(name).lister(bundle, sp, ep, m, scratch)


def topk_range(
    bundle: IndexBundle, name: str, sp: int, ep: int, k: int, scratch: Scratch | None = None
) -> list[TopkHit]:
    structure = get_structure(name)
    if structure.topk is None:
        raise InvalidParams(
            f"Structure {name!r} answers listing only; top-k needs one of {', '.join(TOPK_STRUCTURES)}."
        )
    return structure.topk(bundle, sp, ep, k, scratch)
