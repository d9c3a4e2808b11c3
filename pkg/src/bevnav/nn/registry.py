"""Network blocks registered by name so ``bevnav gradcheck`` can check each one.

A block's factory takes a seed and returns a freshly initialized instance
together with the inputs and scalar loss used to check it.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from bevnav.common.errors import ConfigError
from bevnav.nn.layers import Module
from bevnav.nn.tensor import Tensor


@dataclass
class BlockCase:
    model: Module
    inputs: tuple[Any, ...] = ()
    loss_fn: Callable[..., Tensor] | None = None


@dataclass(frozen=True)
class Block:
    name: str
    factory: Callable[[int], BlockCase]
    description: str = ""
    tags: tuple[str, ...] = field(default_factory=tuple)


class BlockRegistry:
    def __init__(self) -> None:
        self._blocks: dict[str, Block] = {}

    def register(
        self,
        name: str,
        factory: Callable[[int], BlockCase],
        description: str = "",
        tags: list[str] | None = None,
    ) -> Block:
        if name in self._blocks:
            raise ConfigError(f"block {name!r} is already registered")
        block = Block(name=name, factory=factory, description=description, tags=tuple(tags or ()))
        self._blocks[name] = block
        return block

    def get(self, name: str) -> Block | None:
        return self._blocks.get(name)

    def list_blocks(self, tag: str | None = None) -> list[Block]:
        """Blocks in registration order, optionally restricted to one tag."""
        return [b for b in self._blocks.values() if tag is None or tag in b.tags]

    def build(self, name: str, seed: int = 0) -> BlockCase:
        block = self._blocks.get(name)
        if block is None:
            raise ConfigError(f"unknown block {name!r}; registered: {sorted(self._blocks)}")
        return block.factory(seed)

    def __contains__(self, name: str) -> bool:
        return name in self._blocks

    def __len__(self) -> int:
        return len(self._blocks)


default_registry = BlockRegistry()
