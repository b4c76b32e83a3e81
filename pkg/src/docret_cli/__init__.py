"""Document listing and top-k document retrieval toolkit."""

from .bench import BenchRow, SizeReport, collection_stats, measure_size, run_queries
from .cli import Docret, main
from .corpus import (
	TERMINATOR,
	BitvectorRank,
	Collection,
	build_collection,
	doc_of,
	rank1,
	read_docs,
	read_directory,
	select1,
	write_docs,
)
from .datagen import (
	GenSpec,
	empirical_distribution,
	gen_concat,
	gen_dna,
	gen_patterns_substr,
	gen_version,
	mutate_zero_order,
	random_source,
	read_patterns,
	write_patterns,
)
from .doclist import (
	ListResult,
	Scratch,
	TopkHit,
	count_freqs,
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
from .errors import DataError, DocretError, UsageError
from .grammar import (
	FreqEncoding,
	Grammar,
	SetGrammar,
	decode_freqs,
	encode_freqs,
	repair_compress,
	repair_compress_many,
	repair_decompress,
	repair_expand_prefix,
	setpair_compress,
	setpair_expand,
)
from .pdl import PdlIndex, build_pdl, pdl_list, pdl_topk
from .rmq import RmqIndex, build_rmq, rmq
from .storage import MAGIC, FORMAT_VERSION, IndexBundle, read_index, write_index
from .structures import STRUCTURE_NAMES, build_bundle
from .suffixes import IlcpRuns, SuffixIndex, build_c, build_da, build_ilcp, build_lcp, build_sa, build_suffix_index, find, locate

__all__ = [
	"Docret",
	"main",
	"TERMINATOR",
	"BitvectorRank",
	"Collection",
	"build_collection",
	"doc_of",
	"rank1",
	"select1",
	"read_docs",
	"read_directory",
	"write_docs",
	"SuffixIndex",
	"IlcpRuns",
	"build_sa",
	"find",
	"locate",
	"build_da",
	"build_lcp",
	"build_ilcp",
	"build_c",
	"build_suffix_index",
	"RmqIndex",
	"build_rmq",
	"rmq",
	"ListResult",
	"TopkHit",
	"Scratch",
	"list_brute_l",
	"list_brute_d",
	"list_mut",
	"list_sada_d",
	"list_sada_l",
	"list_ilcp_d",
	"list_ilcp_l",
	"list_ilcp_runs",
	"count_freqs",
	"topk_brute_d",
	"topk_brute_l",
	"Grammar",
	"SetGrammar",
	"FreqEncoding",
	"repair_compress",
	"repair_compress_many",
	"repair_decompress",
	"repair_expand_prefix",
	"setpair_compress",
	"setpair_expand",
	"encode_freqs",
	"decode_freqs",
	"PdlIndex",
	"build_pdl",
	"pdl_list",
	"pdl_topk",
	"GenSpec",
	"mutate_zero_order",
	"empirical_distribution",
	"random_source",
	"gen_dna",
	"gen_concat",
	"gen_version",
	"gen_patterns_substr",
	"read_patterns",
	"write_patterns",
	"IndexBundle",
	"MAGIC",
	"FORMAT_VERSION",
	"read_index",
	"write_index",
	"STRUCTURE_NAMES",
	"build_bundle",
	"SizeReport",
	"BenchRow",
	"measure_size",
	"run_queries",
	"collection_stats",
	"DocretError",
	"UsageError",
	"DataError",
]
