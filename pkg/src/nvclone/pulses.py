"""Pulse-sequence IR, the line-oriented ``.seq`` language and the presets.

A ``.seq`` program is a list of statements, one per line::

    init
    mw 1 angle=90 phase=0            # pulse area in degrees
    mw 2 dur=100 phase=0 detuning=1e6
    wait 20                          # nanoseconds
    readout 300

``#`` starts a comment. Angles and phases are degrees, ``dur``, ``wait`` and
``readout`` are nanoseconds, ``detuning`` is Hz. Internally all ops carry
radians and seconds.
"""
import math
from dataclasses import dataclass, replace

from .errors import SemanticError, SequenceSyntaxError, UnknownPreset

DEFAULT_READOUT = 300e-9
DEFAULT_TOMO_SPAN = 2e-6
# 1 ns probe spacing; coarser grids cannot pin the start point to +-0.02 at
# 1e5 shots with the default readout contrast.
DEFAULT_TOMO_POINTS = 2001
FIG5_DT = (20e-9, 50e-9)


@dataclass(frozen=True)
class Init:
    pass


@dataclass(frozen=True)
class Mw:
    """Microwave pulse on channel 1 (0 <-> -1) or 2 (0 <-> +1).

    Exactly one of ``angle`` (rad) and ``duration`` (s) is set.
    """

    channel: int
    angle: float = None
    duration: float = None
    phase: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if self.channel not in (1, 2):
            raise SemanticError(f"channel must be 1 or 2, got {self.channel!r}")
        if (self.angle is None) == (self.duration is None):
            raise SemanticError("exactly one of angle and dur must be given")
        if self.duration is not None and self.duration < 0:
            raise SemanticError("pulse duration must be non-negative")


@dataclass(frozen=True)
class Wait:
    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise SemanticError("wait duration must be non-negative")


@dataclass(frozen=True)
class Readout:
    window: float = DEFAULT_READOUT

    def __post_init__(self):
        if self.window < 0:
            raise SemanticError("readout window must be non-negative")


def _close(a, b, rel=1e-12):
    if a is None or b is None:
        return a is b
    return math.isclose(a, b, rel_tol=rel, abs_tol=1e-300)


def ops_close(a, b, rel=1e-12):
    """Structural equality of two ops up to float round-off."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Init):
        return True
    if isinstance(a, Mw):
        return (a.channel == b.channel and _close(a.angle, b.angle, rel)
                and _close(a.duration, b.duration, rel)
                and _close(a.phase, b.phase, rel)
                and _close(a.detuning, b.detuning, rel))
    if isinstance(a, Wait):
        return _close(a.duration, b.duration, rel)
    return _close(a.window, b.window, rel)


@dataclass(frozen=True)
class PulseSequence:
    """Validated, immutable pulse program.

    ``tomography`` names the channel of the Rabi pulse appended at analysis
    time (presets fig3a-d and fig5); it is ``None`` for plain programs.
    """

    ops: tuple
    name: str = ""
    tomography: int = None

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        validate_ops(self.ops)

    def __len__(self):
        return len(self.ops)

    def structurally_equal(self, other, rel=1e-12):
        return len(self.ops) == len(other.ops) and all(
            ops_close(a, b, rel) for a, b in zip(self.ops, other.ops))

    def prefix(self):
        """Ops up to (not including) the first Readout."""
        out = []
        for op in self.ops:
            if isinstance(op, Readout):
                break
            out.append(op)
        return tuple(out)

    def with_probe(self, channel, duration, phase=0.0):
        """Insert a fixed-duration Mw probe right before the first Readout."""
        pre = self.prefix()
        rest = self.ops[len(pre):]
        ops = pre + (Mw(channel, duration=duration, phase=phase),) + rest
        return PulseSequence(ops, self.name, self.tomography)

    def render(self):
        return render(self)


def validate_ops(ops, lines=None):
    """Check ordering invariants; ``lines`` maps op index to source line."""
    def where(i):
        return (lines[i], 1) if lines is not None and i < len(lines) else (None, None)

    if not ops or not isinstance(ops[0], Init):
        raise SemanticError("sequence must begin with init", *where(0))
    if not isinstance(ops[-1], Readout):
        raise SemanticError("sequence must end with readout", *where(len(ops) - 1))
    seen_readout = False
    for i, op in enumerate(ops):
        if not isinstance(op, (Init, Mw, Wait, Readout)):
            raise SemanticError(f"unknown op {op!r}", *where(i))
        if isinstance(op, Readout):
            seen_readout = True
        elif isinstance(op, Mw) and seen_readout:
            raise SemanticError("mw pulse after readout", *where(i))


# -- parser ----------------------------------------------------------------

_KEYWORDS = ("init", "mw", "wait", "readout")


def _number(tok, line, col, what):
    try:
        value = float(tok)
    except ValueError:
        raise SequenceSyntaxError(f"invalid number {tok!r}", line, col,
                                  expected=(what,)) from None
    if not math.isfinite(value):
        raise SequenceSyntaxError(f"non-finite number {tok!r}", line, col,
                                  expected=(what,))
    return value


def _tokens(text):
    """Yield (token, column) pairs; columns are 1-based."""
    col = 0
    n = len(text)
    while col < n:
        while col < n and text[col] in " \t":
            col += 1
        if col >= n:
            break
        start = col
        while col < n and text[col] not in " \t":
            col += 1
        yield text[start:col], start + 1


def _parse_mw(toks, lineno, end_col):
    if len(toks) < 2:
        raise SequenceSyntaxError("mw needs a channel", lineno, end_col,
                                  expected=("1", "2"))
    ch_tok, ch_col = toks[1]
    if ch_tok not in ("1", "2"):
        raise SequenceSyntaxError(f"bad channel {ch_tok!r}", lineno, ch_col,
                                  expected=("1", "2"))
    kv = {}
    for tok, col in toks[2:]:
        key, eq, val = tok.partition("=")
        if not eq or key not in ("angle", "dur", "phase", "detuning"):
            raise SequenceSyntaxError(f"unexpected {tok!r}", lineno, col,
                                      expected=("angle=", "dur=", "phase=", "detuning="))
        if key in kv:
            raise SequenceSyntaxError(f"duplicate key {key!r}", lineno, col)
        kv[key] = (_number(val, lineno, col + len(key) + 1, f"{key} value"), col)
    if "angle" in kv and "dur" in kv:
        raise SemanticError("both angle and dur given", lineno, kv["dur"][1])
    if "angle" not in kv and "dur" not in kv:
        raise SequenceSyntaxError("mw needs a pulse area or duration", lineno, end_col,
                                  expected=("angle=", "dur="))
    if "phase" not in kv:
        raise SequenceSyntaxError("mw needs a phase", lineno, end_col,
                                  expected=("phase=",))
    if "dur" in kv and kv["dur"][0] < 0:
        raise SemanticError("negative pulse duration", lineno, kv["dur"][1])
    return Mw(
        channel=int(ch_tok),
        angle=math.radians(kv["angle"][0]) if "angle" in kv else None,
        duration=kv["dur"][0] / 1e9 if "dur" in kv else None,
        phase=math.radians(kv["phase"][0]),
        detuning=kv["detuning"][0] if "detuning" in kv else 0.0,
    )


def _parse_timed(toks, lineno, end_col, cls):
    word = toks[0][0]
    if len(toks) != 2:
        col = toks[2][1] if len(toks) > 2 else end_col
        raise SequenceSyntaxError(f"{word} takes exactly one duration", lineno, col,
                                  expected=("<ns>",) if len(toks) < 2 else ("end of line",))
    tok, col = toks[1]
    value = _number(tok, lineno, col, "<ns>")
    if value < 0:
        raise SemanticError(f"negative {word} duration", lineno, col)
    return cls(value / 1e9)


def parse_sequence(text, name=""):
    """Parse ``.seq`` source into a validated PulseSequence.

    Raises:
        SequenceSyntaxError: malformed statement, with line/column and the
            expected tokens.
        SemanticError: ordering invariants violated, or both angle and dur.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SequenceSyntaxError(f"input is not UTF-8 (byte {exc.start})") from None
    ops, lines = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        toks = list(_tokens(body))
        if not toks:
            continue
        word, col = toks[0]
        end_col = len(body) + 1
        if word == "init":
            if len(toks) > 1:
                raise SequenceSyntaxError("init takes no arguments", lineno, toks[1][1],
                                          expected=("end of line",))
            op = Init()
        elif word == "mw":
            op = _parse_mw(toks, lineno, end_col)
        elif word == "wait":
            op = _parse_timed(toks, lineno, end_col, Wait)
        elif word == "readout":
            op = _parse_timed(toks, lineno, end_col, Readout)
        else:
            raise SequenceSyntaxError(f"unknown statement {word!r}", lineno, col,
                                      expected=_KEYWORDS)
        ops.append(op)
        lines.append(lineno)
    validate_ops(ops, lines)
    return PulseSequence(tuple(ops), name)


def _fmt(x):
    return repr(float(x))


def render(seq):
    """Inverse of :func:`parse_sequence` up to float round-off."""
    out = []
    for op in seq.ops:
        if isinstance(op, Init):
            out.append("init")
        elif isinstance(op, Mw):
            area = (f"angle={_fmt(math.degrees(op.angle))}" if op.angle is not None
                    else f"dur={_fmt(op.duration * 1e9)}")
            line = f"mw {op.channel} {area} phase={_fmt(math.degrees(op.phase))}"
            if op.detuning:
                line += f" detuning={_fmt(op.detuning)}"
            out.append(line)
        elif isinstance(op, Wait):
            out.append(f"wait {_fmt(op.duration * 1e9)}")
        else:
            out.append(f"readout {_fmt(op.window * 1e9)}")
    return "\n".join(out) + "\n"


# -- presets ---------------------------------------------------------------

def _clone_ops(prep_angle, prep_phase=0.0, wait=None, readout=DEFAULT_READOUT):
    ops = [Init(), Mw(1, angle=prep_angle, phase=prep_phase)]
    if wait is not None:
        ops.append(Wait(wait))
    ops += [Mw(2, angle=math.pi / 2, phase=0.0), Readout(readout)]
    return tuple(ops)


_FIG3 = {
    "fig3a": (math.pi / 2, 1),
    "fig3b": (math.pi / 2, 2),
    "fig3c": (3 * math.pi / 2, 1),
    "fig3d": (3 * math.pi / 2, 2),
}

PRESET_NAMES = ("fig3a", "fig3b", "fig3c", "fig3d", "fig3a-clone", "fig3c-clone",
                "fig5", "rabi-cal", "esr")


def preset(name, **kw):
    """Build a named sequence from the experiment catalogue.

    fig3a-d prepare with an MW1 pi/2 (a, b) or 3pi/2 (c, d) pulse, clone with
    an MW2 pi/2 pulse and tag the sequence with the tomography channel
    (MW1 for a, c; MW2 for b, d). ``fig5`` takes ``j`` and ``dt`` and inserts
    ``Wait(j*dt)`` before the cloning pulse. ``rabi-cal`` takes ``channel``
    and ``duration``. ``esr`` takes a drive frequency ``f`` (Hz) and optional
    ``params`` and ``duration``.

    Keyword ``phase`` (rad) sets the MW1 preparation phase; ``readout`` the
    window in seconds.
    """
    readout = kw.pop("readout", DEFAULT_READOUT)
    if name in _FIG3 or name in ("fig3a-clone", "fig3c-clone"):
        key = name.replace("-clone", "")
        angle, channel = _FIG3[key]
        ops = _clone_ops(angle, kw.pop("phase", 0.0), readout=readout)
        tomo = None if name.endswith("-clone") else channel
        seq = PulseSequence(ops, name, tomo)
    elif name == "fig5":
        j = kw.pop("j")
        dt = kw.pop("dt", FIG5_DT[0])
        if j < 0 or dt < 0:
            raise SemanticError("fig5 needs j >= 0 and dt >= 0")
        ops = _clone_ops(math.pi / 2, kw.pop("phase", 0.0), wait=j * dt, readout=readout)
        seq = PulseSequence(ops, f"fig5(j={j},dt={dt!r})", kw.pop("tomography", 1))
    elif name == "rabi-cal":
        channel = kw.pop("channel", 1)
        ops = (Init(), Mw(channel, duration=kw.pop("duration", 0.0)), Readout(readout))
        seq = PulseSequence(ops, f"rabi-cal({channel})", channel)
    elif name == "esr":
        seq = _esr_preset(kw.pop("f"), kw.pop("params", None), kw.pop("duration", None),
                          readout)
    else:
        raise UnknownPreset(name)
    if kw:
        raise TypeError(f"unexpected preset arguments for {name}: {sorted(kw)}")
    return seq


def _esr_preset(f, params, duration, readout):
    from .spin import NvParams, build_hamiltonian, transition_frequencies

    params = params or NvParams()
    f_lo, f_hi = transition_frequencies(build_hamiltonian(params))
    channel, f0 = (1, f_lo) if abs(f - f_lo) <= abs(f - f_hi) else (2, f_hi)
    if duration is None:
        mw = Mw(channel, angle=math.pi, detuning=f - f0)
    else:
        mw = Mw(channel, duration=duration, detuning=f - f0)
    return PulseSequence((Init(), mw, Readout(readout)), f"esr({f!r})", None)


def tomography_grid(span=DEFAULT_TOMO_SPAN, points=DEFAULT_TOMO_POINTS):
    """Probe durations 0..span (inclusive) for the tomography Rabi traces."""
    if points < 2 or span <= 0:
        raise ValueError("tomography grid needs >= 2 points and a positive span")
    return tuple(span * k / (points - 1) for k in range(points))


def replace_op(seq, index, op):
    ops = list(seq.ops)
    ops[index] = op
    return replace(seq, ops=tuple(ops))
