from dataclasses import dataclass, field
from typing import List, Optional, Sequence


@dataclass(frozen=True)
class PaletteBlock:
    """A contiguous range of color ids reserved for one stage"""
    stage: str
    offset: int
    size: int

    @property
    def end(self) -> int:
        return self.offset + self.size

    def __contains__(self, color: int) -> bool:
        return self.offset <= color < self.end


@dataclass
class PartialColoring:
    colors: List[Optional[int]]
    palette_offset: int
    palette_size: int

    def __post_init__(self):
        for node, color in enumerate(self.colors):
            if color is not None and not (self.palette_offset <= color < self.palette_offset + self.palette_size):
                raise ValueError(
                    f"node {node} has color {color} outside "
                    f"[{self.palette_offset}, {self.palette_offset + self.palette_size})"
                )

    @property
    def uncolored(self) -> List[int]:
        return [v for v, c in enumerate(self.colors) if c is None]

    @property
    def colored_count(self) -> int:
        return sum(1 for c in self.colors if c is not None)


@dataclass
class ColoringState:
    """Per-node optional color plus the palette blocks the colors were drawn from"""
    colors: List[Optional[int]]
    blocks: List[PaletteBlock] = field(default_factory=list)

    @classmethod
    def empty(cls, n: int) -> "ColoringState":
        return cls(colors=[None] * n)

    @property
    def n(self) -> int:
        return len(self.colors)

    @property
    def uncolored(self) -> List[int]:
        return [v for v, c in enumerate(self.colors) if c is None]

    @property
    def is_complete(self) -> bool:
        return all(c is not None for c in self.colors)

    def next_offset(self) -> int:
        return max((b.end for b in self.blocks), default=0)

    def absorb(self, partial: PartialColoring, nodes: Sequence[int], stage: str) -> None:
        """Copy a partial coloring computed on a subgraph back onto the original node ids.

        nodes[i] is the original id of subgraph node i.
        """
        if len(nodes) != len(partial.colors):
            raise ValueError(f"mapping has {len(nodes)} nodes, partial coloring has {len(partial.colors)}")
        self.blocks.append(PaletteBlock(stage, partial.palette_offset, partial.palette_size))
        for local, original in enumerate(nodes):
            color = partial.colors[local]
            if color is None:
                continue
            if self.colors[original] is not None:
                raise ValueError(f"node {original} colored twice (stage {stage})")
            self.colors[original] = color

    def merge(self, other: "ColoringState", nodes: Sequence[int], prefix: str = "") -> None:
        """absorb() for a complete sub-run: every block of `other` is kept separately"""
        for block in other.blocks:
            colors = [c if c is not None and c in block else None for c in other.colors]
            self.absorb(PartialColoring(colors, block.offset, block.size), nodes, prefix + block.stage)
