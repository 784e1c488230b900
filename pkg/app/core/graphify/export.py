import re
from typing import List

from app.core.errors import NASGraphError
from .graph import ArchGraph, Node


def _fmt_score(score: float) -> str:
    return f"{score:.9g}"


def _tsv_node(node: Node) -> str:
    return f"{node[0]}:{node[1]}"


def _dot_node(node: Node) -> str:
    return f"b{node[0]}_c{node[1]}"


def to_tsv(graph: ArchGraph) -> str:
    """One ``src_block:src_ch<TAB>dst_block:dst_ch<TAB>score`` row per edge."""
    lines = [
        f"{_tsv_node(graph.nodes[s])}\t{_tsv_node(graph.nodes[d])}\t{_fmt_score(w)}\n"
        for s, d, w in graph.edges()
    ]
    return "".join(lines)


def to_dot(graph: ArchGraph) -> str:
    lines = ["digraph nasgraph {\n"]
    lines.extend(f"  {_dot_node(node)};\n" for node in graph.nodes)
    lines.extend(
        f"  {_dot_node(graph.nodes[s])} -> {_dot_node(graph.nodes[d])} "
        f"[score={_fmt_score(w)}];\n"
        for s, d, w in graph.edges()
    )
    lines.append("}\n")
    return "".join(lines)


_NODE_ID = r"b(\d+)_c(\d+)"
_NODE_LINE = re.compile(rf"^{_NODE_ID};$")
_EDGE_LINE = re.compile(rf"^{_NODE_ID} -> {_NODE_ID} \[score=([^\]]+)\];$")


def parse_dot(text: str) -> ArchGraph:
    """Read back what ``to_dot`` writes. Not a general DOT parser."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != "digraph nasgraph {" or lines[-1] != "}":
        raise NASGraphError("Not a nasgraph digraph.")

    nodes: List[Node] = []
    index = {}
    src, dst, score = [], [], []
    for line in lines[1:-1]:
        match = _NODE_LINE.match(line)
        if match:
            node = (int(match.group(1)), int(match.group(2)))
            if node in index:
                raise NASGraphError(f"Node {_dot_node(node)} declared twice.")
            index[node] = len(nodes)
            nodes.append(node)
            continue
        match = _EDGE_LINE.match(line)
        if not match:
            raise NASGraphError(f"Unrecognised DOT line: {line!r}")
        head = (int(match.group(1)), int(match.group(2)))
        tail = (int(match.group(3)), int(match.group(4)))
        if head not in index or tail not in index:
            raise NASGraphError(f"Edge references an undeclared node: {line!r}")
        src.append(index[head])
        dst.append(index[tail])
        try:
            score.append(float(match.group(5)))
        except ValueError:
            raise NASGraphError(f"Bad edge score: {line!r}")
    return ArchGraph(tuple(nodes), src, dst, score)
