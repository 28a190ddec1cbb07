"""Uniform pseudorandom generator families with exact integer state.

Three families are provided: the plain linear congruential generator
(LCG), a combined three-stream LCG built on the AS 183 constants of
Wichmann and Hill (1982), and a 32-bit Mersenne Twister used as the
reference generator.  Every recurrence runs on Python integers, which
are arbitrary precision, so ``a * state + c`` never overflows for any
modulus up to and beyond 2**64.  A uniform is produced by one exact
integer division per step and always lies in [0, 1).

The module also owns period analysis for the LCG family -- a
full-period test based on the classical increment/multiplier
divisibility conditions, plus a brute-force cycle finder that serves as
its independent check -- and the plain-text sample file format used by
the command line tools.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

try:  # optional compiled kernel for the brute-force cycle finder
    import numba
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None

__all__ = [
    "FactorizationError",
    "LcgParams",
    "UniformGenerator",
    "Lcg",
    "CombinedLcg",
    "WichmannHill",
    "MT19937",
    "Sample",
    "lcg_next",
    "combined_lcg_next",
    "full_period_predicate",
    "brute_force_period",
    "make_generator",
    "save_sample",
    "load_sample",
    "WH_AS183_MODULI",
    "WH_AS183_MULTIPLIERS",
]

DEFAULT_FACTOR_BOUND = 10**7
SAMPLE_HEADER_PREFIX = "# rngaudit-sample v1"


class FactorizationError(Exception):
    """Modulus could not be factored within the trial-division bound."""


# ---------------------------------------------------------------------------
# linear congruential generators


@dataclass(frozen=True)
class LcgParams:
    """Parameters of one linear congruential stream.

    The recurrence is ``state' = (multiplier * state + increment) % modulus``
    and each step's uniform is ``state' / modulus``.  Invariants enforced at
    construction: ``0 < multiplier < modulus``, ``0 <= increment < modulus``,
    ``0 <= seed < modulus``.
    """

    modulus: int
    multiplier: int
    increment: int = 0
    seed: int = 1

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 < self.multiplier < self.modulus:
            raise ValueError("multiplier must satisfy 0 < a < modulus")
        if not 0 <= self.increment < self.modulus:
            raise ValueError("increment must satisfy 0 <= c < modulus")
        if not 0 <= self.seed < self.modulus:
            raise ValueError("seed must satisfy 0 <= seed < modulus")

    @property
    def descriptor(self) -> str:
        return (
            f"lcg:m={self.modulus},a={self.multiplier},"
            f"c={self.increment},seed={self.seed}"
        )

    def with_seed(self, seed: int) -> "LcgParams":
        return LcgParams(self.modulus, self.multiplier, self.increment, seed)


def lcg_next(state: int, params: LcgParams) -> tuple[int, float]:
    """Advance one step; the uniform is the new state divided by the modulus."""
    if not 0 <= state < params.modulus:
        raise ValueError("state out of range for modulus")
    new = (params.multiplier * state + params.increment) % params.modulus
    return new, new / params.modulus


class UniformGenerator:
    """Base class for a deterministic stream of uniforms in [0, 1)."""

    @property
    def descriptor(self) -> str:
        raise NotImplementedError

    def next_uniform(self) -> float:
        raise NotImplementedError

    def generate(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("count must be nonnegative")
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            out[i] = self.next_uniform()
        return out

    def sample(self, n: int) -> "Sample":
        return Sample(self.generate(n), provenance=self.descriptor)


class Lcg(UniformGenerator):
    """Plain linear congruential stream over exact integers."""

    def __init__(self, params: LcgParams):
        self.params = params
        self.state = params.seed

    @property
    def descriptor(self) -> str:
        return self.params.descriptor

    def next_uniform(self) -> float:
        p = self.params
        self.state = (p.multiplier * self.state + p.increment) % p.modulus
        return self.state / p.modulus

    def generate(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("count must be nonnegative")
        m, a, c = self.params.modulus, self.params.multiplier, self.params.increment
        y = self.state
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            y = (a * y + c) % m
            out[i] = y / m
        self.state = y
        return out


# ---------------------------------------------------------------------------
# combined (Wichmann-Hill style) generators

# Constants of algorithm AS 183 (Wichmann & Hill 1982, Applied Statistics 31).
WH_AS183_MODULI = (30269, 30307, 30323)
WH_AS183_MULTIPLIERS = (171, 172, 170)


def combined_lcg_next(
    states: tuple[int, ...],
    moduli: tuple[int, ...] = WH_AS183_MODULI,
    multipliers: tuple[int, ...] = WH_AS183_MULTIPLIERS,
) -> tuple[tuple[int, ...], float]:
    """Advance each zero-increment component and combine fractionally.

    Every component steps as ``s' = (a * s) % m``; the output is the
    fractional part of the sum of the component uniforms ``s'/m``.
    """
    if not (len(states) == len(moduli) == len(multipliers)):
        raise ValueError("component count mismatch")
    new = tuple((a * s) % m for s, a, m in zip(states, multipliers, moduli))
    u = sum(s / m for s, m in zip(new, moduli)) % 1.0
    return new, u


class CombinedLcg(UniformGenerator):
    """Sum of several zero-increment LCG outputs, taken modulo one."""

    def __init__(self, moduli, multipliers, seeds):
        moduli = tuple(int(m) for m in moduli)
        multipliers = tuple(int(a) for a in multipliers)
        seeds = tuple(int(s) for s in seeds)
        if not (len(moduli) == len(multipliers) == len(seeds)) or len(moduli) < 2:
            raise ValueError("need matching moduli/multipliers/seeds, at least two")
        for m, a, s in zip(moduli, multipliers, seeds):
            if m < 2:
                raise ValueError("component modulus must be >= 2")
            if not 0 < a < m:
                raise ValueError("component multiplier must satisfy 0 < a < m")
            # zero is absorbing for a zero-increment component
            if not 0 < s < m:
                raise ValueError("component seed must satisfy 0 < seed < m")
        self.moduli = moduli
        self.multipliers = multipliers
        self.states = seeds
        self._seeds = seeds

    @property
    def descriptor(self) -> str:
        parts = [
            f"m{i + 1}={m},a{i + 1}={a},seed{i + 1}={s}"
            for i, (m, a, s) in enumerate(
                zip(self.moduli, self.multipliers, self._seeds)
            )
        ]
        return "combined:" + ",".join(parts)

    def next_uniform(self) -> float:
        self.states, u = combined_lcg_next(self.states, self.moduli, self.multipliers)
        return u


class WichmannHill(CombinedLcg):
    """The AS 183 three-stream combined generator."""

    def __init__(self, seed1: int = 1, seed2: int = 1, seed3: int = 1):
        super().__init__(WH_AS183_MODULI, WH_AS183_MULTIPLIERS, (seed1, seed2, seed3))

    @property
    def descriptor(self) -> str:
        s1, s2, s3 = self._seeds
        return f"wh:seed1={s1},seed2={s2},seed3={s3}"


# ---------------------------------------------------------------------------
# Mersenne Twister reference generator

_MT_N = 624
_MT_M = 397
_MT_MATRIX_A = 0x9908B0DF
_MT_UPPER = 0x80000000
_MT_LOWER = 0x7FFFFFFF
_MT_SEED_MULT = 1812433253
_TWO32 = 4294967296.0


class MT19937(UniformGenerator):
    """Standard 32-bit Mersenne Twister with scalar integer seeding.

    Raw words map to uniforms as ``word / 2**32``, so exact 0.0 can occur.
    The twist is applied one 624-word block at a time with numpy, which
    keeps bulk generation fast without changing the output sequence.
    """

    def __init__(self, seed: int = 5489):
        if not 0 <= seed < 2**32:
            raise ValueError("seed must be a 32-bit nonnegative integer")
        self._seed = int(seed)
        state = [0] * _MT_N
        state[0] = self._seed
        for i in range(1, _MT_N):
            prev = state[i - 1]
            state[i] = (_MT_SEED_MULT * (prev ^ (prev >> 30)) + i) & 0xFFFFFFFF
        self._state = np.array(state, dtype=np.uint32)
        self._cache = np.empty(0, dtype=np.uint32)
        self._pos = 0

    @property
    def descriptor(self) -> str:
        return f"mt:seed={self._seed}"

    def _next_block(self) -> np.ndarray:
        """Twist the state and return the 624 tempered output words."""
        mt = self._state
        nxt = np.empty(_MT_N, dtype=np.uint32)
        y = (mt & np.uint32(_MT_UPPER)) | (
            np.concatenate((mt[1:], mt[:1])) & np.uint32(_MT_LOWER)
        )
        toggle = np.where(
            (y & np.uint32(1)).astype(bool), np.uint32(_MT_MATRIX_A), np.uint32(0)
        )
        core = (y >> np.uint32(1)) ^ toggle
        # entries 0..622 use the pre-twist words mt[k] and mt[k+1]; the
        # mt[k + M (mod N)] partner crosses into already-updated territory
        # for k >= N - M, hence the three slices.
        nxt[: _MT_N - _MT_M] = mt[_MT_M :] ^ core[: _MT_N - _MT_M]
        nxt[_MT_N - _MT_M : 2 * (_MT_N - _MT_M)] = (
            nxt[: _MT_N - _MT_M] ^ core[_MT_N - _MT_M : 2 * (_MT_N - _MT_M)]
        )
        nxt[2 * (_MT_N - _MT_M) : _MT_N - 1] = (
            nxt[_MT_N - _MT_M : _MT_M - 1] ^ core[2 * (_MT_N - _MT_M) : _MT_N - 1]
        )
        y_last = (int(mt[_MT_N - 1]) & _MT_UPPER) | (int(nxt[0]) & _MT_LOWER)
        last = int(nxt[_MT_M - 1]) ^ (y_last >> 1)
        if y_last & 1:
            last ^= _MT_MATRIX_A
        nxt[_MT_N - 1] = np.uint32(last)
        self._state = nxt

        w = nxt.copy()
        w ^= w >> np.uint32(11)
        w ^= (w << np.uint32(7)) & np.uint32(0x9D2C5680)
        w ^= (w << np.uint32(15)) & np.uint32(0xEFC60000)
        w ^= w >> np.uint32(18)
        return w

    def next_word(self) -> int:
        if self._pos >= self._cache.size:
            self._cache = self._next_block()
            self._pos = 0
        word = int(self._cache[self._pos])
        self._pos += 1
        return word

    def next_uniform(self) -> float:
        return self.next_word() / _TWO32

    def generate(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("count must be nonnegative")
        parts = []
        need = n
        avail = self._cache.size - self._pos
        if avail > 0 and need > 0:
            take = min(need, avail)
            parts.append(self._cache[self._pos : self._pos + take])
            self._pos += take
            need -= take
        while need > 0:
            block = self._next_block()
            take = min(need, _MT_N)
            parts.append(block[:take])
            self._cache = block
            self._pos = take
            need -= take
        if parts:
            words = np.concatenate(parts)
        else:
            words = np.empty(0, dtype=np.uint32)
        return words.astype(np.float64) / _TWO32


# ---------------------------------------------------------------------------
# period analysis

def _distinct_prime_factors(n: int, bound: int) -> list[int]:
    """Distinct primes dividing n, certified by trial division up to bound."""
    if n < 2:
        return []
    factors = []
    if n % 2 == 0:
        factors.append(2)
        while n % 2 == 0:
            n //= 2
    p = 3
    while p * p <= n and p <= bound:
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        # n now has no factor <= min(bound, sqrt(original cofactor)); it is
        # certified prime when the loop ran past sqrt(n) or n <= bound**2.
        if p * p > n or n <= bound * bound:
            factors.append(n)
        else:
            raise FactorizationError(
                f"cofactor {n} exceeds the trial-division bound {bound}; "
                "cannot certify the factor list"
            )
    return factors


def full_period_predicate(
    params: LcgParams, factor_bound: int = DEFAULT_FACTOR_BOUND
) -> bool:
    """True iff the stream visits every residue, i.e. has period = modulus.

    Classical characterization (Knuth, TAOCP vol. 2): the increment must be
    coprime to the modulus, ``multiplier - 1`` must be divisible by every
    prime dividing the modulus, and by 4 whenever the modulus is.  The
    modulus is factored by trial division up to ``factor_bound``; when the
    factor list cannot be certified within the bound a FactorizationError
    is raised instead of guessing.
    """
    m = params.modulus
    if math.gcd(params.increment, m) != 1:
        return False
    b = params.multiplier - 1
    for p in _distinct_prime_factors(m, factor_bound):
        if b % p != 0:
            return False
    if m % 4 == 0 and b % 4 != 0:
        return False
    return True


_NUMBA_STATE_LIMIT = 1 << 24

if numba is not None:
    @numba.njit(cache=True)
    def _period_kernel(m, a, c, y0, cap):  # pragma: no cover - compiled
        seen = np.full(m, -1, dtype=np.int32)
        seen[y0] = 0
        y = y0
        for i in range(1, cap + 1):
            y = (a * y + c) % m
            if seen[y] >= 0:
                return i - seen[y]
            seen[y] = i
        return -1


def brute_force_period(params: LcgParams, cap: int) -> int | None:
    """Cycle length reached from the seed, found by direct enumeration.

    Walks the recurrence marking first-visit indices until a state repeats
    and returns the cycle length (a leading tail, possible for degenerate
    multipliers, is not counted).  Returns None when more than ``cap``
    steps would be needed to see a repeat.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    m, a, c = params.modulus, params.multiplier, params.increment
    y = params.seed
    if numba is not None and m <= _NUMBA_STATE_LIMIT and cap < 2**31:
        r = int(_period_kernel(m, a, c, y, cap))
        return None if r < 0 else r
    seen = {y: 0}
    for i in range(1, cap + 1):
        y = (a * y + c) % m
        if y in seen:
            return i - seen[y]
        seen[y] = i
    return None


# ---------------------------------------------------------------------------
# samples and their file format

@dataclass
class Sample:
    """An ordered, immutable sequence of uniforms in [0, 1) plus provenance."""

    values: np.ndarray
    provenance: str = "external"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("sample must be one-dimensional")
        if v.size and not (np.all(v >= 0.0) and np.all(v < 1.0)):
            raise ValueError("sample values must lie in [0, 1)")
        v = v.copy() if v is self.values else v
        v.setflags(write=False)
        self.values = v

    def __len__(self) -> int:
        return int(self.values.size)


def _atomic_write_text(path, text: str) -> None:
    """Write text via a temp file and rename, so readers never see halves."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rngaudit-tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_sample(sample: Sample, path) -> None:
    """Write one decimal value per line, preceded by a provenance header."""
    lines = [f"{SAMPLE_HEADER_PREFIX} {sample.provenance}"]
    lines.extend(repr(float(v)) for v in sample.values)
    _atomic_write_text(path, "\n".join(lines) + "\n")


def load_sample(path) -> Sample:
    """Read a sample file; '#' comment lines are tolerated and skipped."""
    provenance = "external file"
    values = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith(SAMPLE_HEADER_PREFIX):
                    tail = line[len(SAMPLE_HEADER_PREFIX) :].strip()
                    if tail:
                        provenance = tail
                continue
            values.append(float(line))
    return Sample(np.asarray(values, dtype=np.float64), provenance=provenance)


# ---------------------------------------------------------------------------
# descriptors

def _parse_int_fields(kind: str, text: str, required: tuple[str, ...],
                      optional: tuple[str, ...] = ()) -> dict[str, int]:
    fields: dict[str, int] = {}
    if text:
        for chunk in text.split(","):
            key, sep, value = chunk.partition("=")
            key = key.strip()
            if not sep or key not in required + optional:
                raise ValueError(f"bad field {chunk!r} in {kind!r} descriptor")
            if key in fields:
                raise ValueError(f"duplicate field {key!r} in {kind!r} descriptor")
            try:
                fields[key] = int(value)
            except ValueError:
                raise ValueError(
                    f"field {key!r} in {kind!r} descriptor is not an integer"
                ) from None
    return fields


def make_generator(descriptor: str, seed: int | None = None) -> UniformGenerator:
    """Build a generator from its text descriptor.

    Understood formats::

        lcg:m=<int>,a=<int>,c=<int>,seed=<int>
        wh:seed1=<int>,seed2=<int>,seed3=<int>
        mt:seed=<int>

    ``seed`` overrides the descriptor's own seed field(s); for ``wh`` the
    single integer is folded into each component's range.  Seed fields may
    then be omitted from the descriptor text.
    """
    kind, _, rest = descriptor.strip().partition(":")
    kind = kind.strip()
    if kind == "lcg":
        fields = _parse_int_fields(kind, rest, ("m", "a", "c", "seed"))
        for key in ("m", "a", "c"):
            if key not in fields:
                raise ValueError(f"lcg descriptor is missing field {key!r}")
        if seed is None and "seed" not in fields:
            raise ValueError("lcg descriptor has no seed and none was supplied")
        use_seed = fields["seed"] if seed is None else seed
        return Lcg(LcgParams(fields["m"], fields["a"], fields["c"], use_seed))
    if kind == "wh":
        fields = _parse_int_fields(kind, rest, ("seed1", "seed2", "seed3"))
        if seed is not None:
            if seed < 0:
                raise ValueError("seed must be nonnegative")
            seeds = tuple(seed % (m - 1) + 1 for m in WH_AS183_MODULI)
        else:
            missing = [k for k in ("seed1", "seed2", "seed3") if k not in fields]
            if missing:
                raise ValueError(f"wh descriptor is missing {missing}")
            seeds = (fields["seed1"], fields["seed2"], fields["seed3"])
        return WichmannHill(*seeds)
    if kind == "mt":
        fields = _parse_int_fields(kind, rest, ("seed",))
        if seed is None and "seed" not in fields:
            raise ValueError("mt descriptor has no seed and none was supplied")
        return MT19937(fields["seed"] if seed is None else seed)
    raise ValueError(f"unknown generator kind {kind!r}")
