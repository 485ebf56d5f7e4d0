"""Dealer-based secret key agreement over an RS code with one-time-pad masked dealing.

A dealer encodes K = (s, u_1, ..., u_{k-1}) into Z = K G, hands each terminal
``u`` symbols masked by pre-shared pads, then publicly broadcasts k - u
symbols nobody received privately. Every terminal then holds k symbols and
decodes K; the eavesdropper sees only masked values plus k - u symbols.
"""
from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AlreadyDiscussed,
    BadMask,
    ConfigError,
    InconsistentShares,
    InsufficientShares,
    NoSharedMaterial,
    ParamViolation,
)
from .field import FieldElement, FieldSpec
from .rs import KeyBlock, RsParams, Share, decode_ints, encode_ints

UNIQUE = "unique_share"
COMMON = "common_share"
MODES = (UNIQUE, COMMON)


class FieldRng:
    """Seeded counter-mode generator (Philox) drawing unbiased residues.

    ``Generator.integers`` uses rejection sampling, so draws are exactly
    uniform on [0, q). With ``seed=None`` the OS entropy pool seeds it.
    """

    def __init__(self, seed: int | None = None):
        self.seed = seed
        self._gen = np.random.Generator(np.random.Philox(seed))

    def residues(self, q: int, size: int) -> list[int]:
        if size == 0:
            return []
        draws = self._gen.integers(0, q, size=size, dtype=np.uint64, endpoint=False)
        return [int(x) for x in draws]

    def uniform(self, size: int) -> np.ndarray:
        return self._gen.random(size)


@dataclass(frozen=True)
class ScenarioConfig:
    num_terminals: int
    active_set: frozenset[int]
    params: RsParams
    mode: str = UNIQUE
    symbols_per_terminal: int = 1
    seed: int | None = None
    # deliveries only to active terminals, for helper experiments
    withhold_helpers: bool = False
    # public symbols beyond k - u; nonzero only for redundancy / leaky fixtures
    extra_public: int = 0

    def __post_init__(self):
        object.__setattr__(self, "active_set", frozenset(int(a) for a in self.active_set))
        V, u, k, n = self.num_terminals, self.symbols_per_terminal, self.params.k, self.params.n
        if V < 1:
            raise ParamViolation("need at least one terminal")
        if not self.active_set or not self.active_set <= set(range(1, V + 1)):
            raise ParamViolation(f"active set must be a nonempty subset of 1..{V}")
        if self.mode not in MODES:
            raise ParamViolation(f"mode must be one of {MODES}, got {self.mode!r}")
        if u < 1:
            raise ParamViolation("symbols_per_terminal must be >= 1")
        if u >= k:
            raise ParamViolation(f"need u < k (u={u}, k={k}); nothing would remain to broadcast")
        if self.extra_public < 0:
            raise ParamViolation("extra_public must be >= 0")
        if self.mode == UNIQUE:
            need = V * u + (k - u) + self.extra_public
            if n < need:
                raise ParamViolation(
                    f"unique_share mode needs n >= |V|*u + (k-u) = {V}*{u} + {k - u}"
                    f"{' + ' + str(self.extra_public) if self.extra_public else ''}"
                    f" = {need}, got n={n} (for u=1: n >= |V| + k - 1)")
        else:
            need = k + self.extra_public
            if n < need:
                raise ParamViolation(f"common_share mode needs n >= k = {need}, got n={n}")

    @property
    def helpers(self) -> frozenset[int]:
        return frozenset(range(1, self.num_terminals + 1)) - self.active_set

    @property
    def terminals(self) -> range:
        return range(1, self.num_terminals + 1)

    def positions_for(self, terminal: int) -> list[int]:
        u = self.symbols_per_terminal
        if self.mode == COMMON:
            return list(range(1, u + 1))
        return list(range((terminal - 1) * u + 1, terminal * u + 1))

    def receives(self, terminal: int) -> bool:
        return not (self.withhold_helpers and terminal not in self.active_set)

    def public_positions(self) -> list[int]:
        count = self.params.k - self.symbols_per_terminal + self.extra_public
        return list(range(self.params.n - count + 1, self.params.n + 1))

    def to_dict(self) -> dict:
        out = {
            "num_terminals": str(self.num_terminals),
            "active_set": [str(a) for a in sorted(self.active_set)],
            "params": params_to_dict(self.params),
            "mode": self.mode,
            "symbols_per_terminal": str(self.symbols_per_terminal),
        }
        if self.seed is not None:
            out["seed"] = str(self.seed)
        if self.withhold_helpers:
            out["withhold_helpers"] = True
        if self.extra_public:
            out["extra_public"] = str(self.extra_public)
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "ScenarioConfig":
        try:
            V = int(d["num_terminals"])
            active = d.get("active_set")
            active = range(1, V + 1) if active is None else [int(a) for a in active]
            seed = d.get("seed")
            return cls(
                num_terminals=V,
                active_set=frozenset(active),
                params=params_from_dict(d["params"]),
                mode=d.get("mode", UNIQUE),
                symbols_per_terminal=int(d.get("symbols_per_terminal", 1)),
                seed=None if seed is None else int(seed),
                withhold_helpers=bool(d.get("withhold_helpers", False)),
                extra_public=int(d.get("extra_public", 0)),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed scenario: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def params_to_dict(p: RsParams) -> dict:
    return {
        "q": str(p.q), "n": str(p.n), "k": str(p.k),
        "alphas": [str(a) for a in p.alphas],
        "coeffs": [str(v) for v in p.coeffs],
    }


def params_from_dict(d: Mapping) -> RsParams:
    alphas = d.get("alphas")
    coeffs = d.get("coeffs")
    return RsParams.create(
        int(d["q"]), int(d["n"]), int(d["k"]),
        None if alphas is None else [int(a) for a in alphas],
        None if coeffs is None else [int(v) for v in coeffs],
    )


@dataclass(frozen=True)
class MaskedShare:
    terminal: int
    index: int
    masked_symbol: FieldElement


@dataclass(frozen=True)
class SharedRandomness:
    """Per-terminal pads, in delivery order. Known to the dealer and that terminal only."""

    masks: Mapping[int, tuple[FieldElement, ...]]

    def for_terminal(self, terminal: int) -> tuple[FieldElement, ...]:
        return self.masks.get(terminal, ())


@dataclass(frozen=True)
class Transcript:
    """Everything the eavesdropper observes."""

    params: RsParams
    mode: str
    masked_deliveries: tuple[MaskedShare, ...] = ()
    public_symbols: tuple[Share, ...] = ()

    def to_dict(self) -> dict:
        return {
            "params": params_to_dict(self.params),
            "mode": self.mode,
            "deliveries": [
                {"terminal": str(d.terminal), "index": str(d.index),
                 "masked_symbol": str(d.masked_symbol.value)}
                for d in self.masked_deliveries
            ],
            "public_symbols": [
                {"index": str(s.index), "symbol": str(s.symbol.value)}
                for s in self.public_symbols
            ],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, d: Mapping) -> "Transcript":
        params = params_from_dict(d["params"])
        f = params.field
        return cls(
            params=params,
            mode=d["mode"],
            masked_deliveries=tuple(
                MaskedShare(int(x["terminal"]), int(x["index"]), f(int(x["masked_symbol"])))
                for x in d.get("deliveries", ())),
            public_symbols=tuple(
                Share(int(x["index"]), f(int(x["symbol"]))) for x in d.get("public_symbols", ())),
        )

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        return cls.from_dict(json.loads(text))

    def deliveries_for(self, terminal: int) -> list[MaskedShare]:
        return [d for d in self.masked_deliveries if d.terminal == terminal]

    def public_positions(self) -> list[int]:
        return [s.index for s in self.public_symbols]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class ShareTransport(ABC):
    """How the dealer gets a codeword symbol privately to one terminal.

    Only the one-time-pad transport is implemented; a public-key transport
    would slot in here with computational instead of perfect secrecy.
    """

    @abstractmethod
    def seal(self, terminal: int, slot: int, symbol: FieldElement) -> FieldElement: ...

    @abstractmethod
    def open(self, terminal: int, slot: int, sealed: FieldElement) -> FieldElement: ...


class OneTimePadTransport(ShareTransport):
    def __init__(self, randomness: SharedRandomness):
        self.randomness = randomness

    def seal(self, terminal, slot, symbol):
        return symbol + self.randomness.for_terminal(terminal)[slot]

    def open(self, terminal, slot, sealed):
        return sealed - self.randomness.for_terminal(terminal)[slot]


@dataclass
class DealerState:
    cfg: ScenarioConfig
    key: KeyBlock
    codeword: tuple[int, ...]
    randomness: SharedRandomness
    transcript: Transcript
    discussed: bool = False


def deal(cfg: ScenarioConfig, rng: FieldRng | None = None) -> tuple[DealerState, Transcript]:
    """Sample K, encode, and emit masked deliveries for every receiving terminal."""
    rng = rng or FieldRng(cfg.seed)
    p = cfg.params
    f, q = p.field, p.q
    message = rng.residues(q, p.k)
    key = KeyBlock.from_ints(f, message)
    z = encode_ints(message, p)
    masks = {}
    for t in cfg.terminals:
        if cfg.receives(t):
            masks[t] = tuple(f(r) for r in rng.residues(q, cfg.symbols_per_terminal))
    randomness = SharedRandomness(masks)
    transport = OneTimePadTransport(randomness)
    deliveries = []
    for t in cfg.terminals:
        if not cfg.receives(t):
            continue
        for slot, idx in enumerate(cfg.positions_for(t)):
            deliveries.append(MaskedShare(t, idx, transport.seal(t, slot, f(z[idx - 1]))))
    transcript = Transcript(p, cfg.mode, tuple(deliveries))
    state = DealerState(cfg, key, tuple(z), randomness, transcript)
    return state, transcript


def public_discussion(state: DealerState) -> Transcript:
    """Append the reserved, never-delivered codeword symbols as plain shares."""
    if state.discussed:
        raise AlreadyDiscussed("public discussion already took place")
    f = state.cfg.params.field
    public = tuple(Share(i, f(state.codeword[i - 1])) for i in state.cfg.public_positions())
    state.transcript = replace(state.transcript, public_symbols=public)
    state.discussed = True
    return state.transcript


def reconstruct(terminal: int, masks: Sequence[FieldElement | int], transcript: Transcript) -> KeyBlock:
    """Unmask this terminal's deliveries, join the public symbols and decode."""
    p = transcript.params
    q = p.q
    mine = transcript.deliveries_for(terminal)
    if len(masks) < len(mine):
        raise InsufficientShares(f"terminal {terminal} lacks masks for its deliveries")
    shares: dict[int, int] = {}
    for d, r in zip(mine, masks):
        shares[d.index] = (d.masked_symbol.value - int(r)) % q
    for s in transcript.public_symbols:
        if shares.setdefault(s.index, s.symbol.value) != s.symbol.value:
            raise BadMask(f"unmasked symbol at position {s.index} contradicts the public one")
    try:
        message = decode_ints(shares, p)
    except InconsistentShares as exc:
        raise BadMask(f"terminal {terminal}: {exc}") from exc
    return KeyBlock.from_ints(p.field, message)


@dataclass
class ProtocolResult:
    dealer_key: KeyBlock
    transcript: Transcript
    recovered: dict[int, KeyBlock | None]
    failures: dict[int, str] = field(default_factory=dict)
    helpers: frozenset[int] = frozenset()

    @property
    def agreement(self) -> bool:
        """Every active terminal holds the dealer's key."""
        active = set(self.recovered) - set(self.helpers)
        return all(self.recovered.get(t) == self.dealer_key for t in active) and all(
            t not in self.failures for t in active)

    def to_dict(self) -> dict:
        return {
            "dealer_key": [str(v) for v in self.dealer_key.ints()],
            "transcript": self.transcript.to_dict(),
            "terminals": [
                {
                    "terminal": str(t),
                    "role": "helper" if t in self.helpers else "active",
                    "key": None if key is None else [str(v) for v in key.ints()],
                    "matches_dealer": key == self.dealer_key,
                    **({"error": self.failures[t]} if t in self.failures else {}),
                }
                for t, key in sorted(self.recovered.items())
            ],
            "agreement": self.agreement,
        }


def run_protocol(cfg: ScenarioConfig) -> ProtocolResult:
    state, _ = deal(cfg)
    transcript = public_discussion(state)
    recovered: dict[int, KeyBlock | None] = {}
    failures: dict[int, str] = {}
    for t in cfg.terminals:
        if not cfg.receives(t):
            recovered[t] = None
            failures[t] = "withheld: helper received no deliveries"
            continue
        try:
            recovered[t] = reconstruct(t, state.randomness.for_terminal(t), transcript)
        except (InsufficientShares, BadMask) as exc:
            recovered[t] = None
            failures[t] = f"{type(exc).__name__}: {exc}"
    return ProtocolResult(state.key, transcript, recovered, failures, cfg.helpers)


def _refresh_layout(params: RsParams, u: int) -> tuple[list[int], list[int]]:
    if u < 1:
        raise NoSharedMaterial("refreshment needs at least one pre-shared symbol")
    if u >= params.k:
        raise ParamViolation(f"need u < k for refreshment (u={u}, k={params.k})")
    anchors = list(range(1, u + 1))
    public = list(range(params.n - (params.k - u) + 1, params.n + 1))
    return anchors, public


def refresh_key(old_key_material: Sequence[FieldElement | int], params: RsParams,
                rng: FieldRng | int | None = None) -> tuple[KeyBlock, Transcript]:
    """Derive a fresh key block from u shared symbols.

    The old material pins the codeword at positions 1..u; the dealer draws the
    k - u symbols at the highest positions uniformly and broadcasts them. The
    new key is the message of the unique codeword through all k values.
    """
    u = len(old_key_material)
    anchors, public = _refresh_layout(params, u)
    if not isinstance(rng, FieldRng):
        rng = FieldRng(rng)
    f = params.field
    fresh = rng.residues(params.q, len(public))
    transcript = Transcript(params, "refresh", (),
                            tuple(Share(i, f(v)) for i, v in zip(public, fresh)))
    return refresh_reconstruct(old_key_material, transcript), transcript


def refresh_reconstruct(old_key_material: Sequence[FieldElement | int], transcript: Transcript) -> KeyBlock:
    """What every terminal computes from its old material and the broadcast."""
    params = transcript.params
    anchors, _ = _refresh_layout(params, len(old_key_material))
    q = params.q
    shares = {i: int(v) % q for i, v in zip(anchors, old_key_material)}
    for s in transcript.public_symbols:
        shares[s.index] = s.symbol.value
    return KeyBlock.from_ints(params.field, decode_ints(shares, params))
