import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvclone.errors import SemanticError, SequenceError, SequenceSyntaxError, UnknownPreset
from nvclone.pulses import (Init, Mw, PulseSequence, Readout, Wait, parse_sequence, preset,
                            render, tomography_grid)


def test_parse_matches_clone_preset():
    seq = parse_sequence("init\nmw 1 angle=90 phase=0\nmw 2 angle=90 phase=0\nreadout 300")
    assert len(seq) == 4
    assert seq.structurally_equal(preset("fig3a-clone"))
    assert seq.ops == preset("fig3a-clone").ops


def test_missing_init_is_semantic_error():
    with pytest.raises(SemanticError):
        parse_sequence("mw 1 angle=90 phase=0")


def test_wait_sequence():
    seq = parse_sequence("init\nwait 20\nreadout 300")
    assert seq.ops == (Init(), Wait(20e-9), Readout(300e-9))


def test_comments_and_blank_lines():
    seq = parse_sequence("# header\n\ninit   # laser\n  mw 2 dur=40 phase=90 detuning=1e6\nreadout 300\n")
    mw = seq.ops[1]
    assert mw.channel == 2 and mw.duration == pytest.approx(40e-9)
    assert mw.phase == pytest.approx(math.pi / 2) and mw.detuning == 1e6


@pytest.mark.parametrize("text, line, column", [
    ("init\nmw 3 angle=90 phase=0\nreadout 300", 2, 4),
    ("init\nmw 1 angel=90 phase=0\nreadout 300", 2, 6),
    ("init\nmw 1 angle=abc phase=0\nreadout 300", 2, 12),
    ("init\nfire\nreadout 300", 2, 1),
    ("init\nwait\nreadout 300", 2, 5),
    ("init\nmw 1 angle=90\nreadout 300", 2, 14),
])
def test_syntax_errors_have_positions(text, line, column):
    with pytest.raises(SequenceSyntaxError) as info:
        parse_sequence(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert info.value.expected


def test_both_angle_and_dur_rejected():
    with pytest.raises(SemanticError) as info:
        parse_sequence("init\nmw 1 angle=90 dur=10 phase=0\nreadout 300")
    assert info.value.line == 2


@pytest.mark.parametrize("text", [
    "init\nmw 1 angle=90 phase=0",                       # no readout
    "init\nreadout 300\nmw 1 angle=90 phase=0\nreadout 300",  # mw after readout
    "",
])
def test_ordering_invariants(text):
    with pytest.raises(SemanticError):
        parse_sequence(text)


def test_fig3_presets():
    a, c = preset("fig3a"), preset("fig3c")
    assert a.tomography == 1 and preset("fig3b").tomography == 2
    assert preset("fig3d").tomography == 2
    assert a.ops[1] == Mw(1, angle=math.pi / 2)
    assert c.ops[1] == Mw(1, angle=3 * math.pi / 2)
    assert a.ops[2] == Mw(2, angle=math.pi / 2)


def test_fig5_zero_wait_is_fig3a_plus_wait():
    f5 = preset("fig5", j=0, dt=20e-9)
    ops = list(f5.ops)
    assert ops.pop(2) == Wait(0.0)
    assert tuple(ops) == preset("fig3a").ops
    assert preset("fig5", j=7, dt=50e-9).ops[2].duration == pytest.approx(350e-9)


def test_rabi_cal_and_esr_presets():
    seq = preset("rabi-cal", channel=2, duration=100e-9)
    assert seq.ops[1] == Mw(2, duration=100e-9)
    esr = preset("esr", f=2.865e9)
    assert esr.ops[1].channel == 1 and esr.ops[1].detuning == pytest.approx(0.0, abs=1e-3)


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        preset("fig9")


def test_probe_insertion_and_prefix():
    seq = preset("fig3a").with_probe(1, 50e-9)
    assert seq.ops[-2] == Mw(1, duration=50e-9)
    assert isinstance(seq.ops[-1], Readout)
    assert preset("fig3a").prefix() == preset("fig3a").ops[:-1]


def test_tomography_grid():
    g = tomography_grid()
    assert g[0] == 0.0 and g[-1] == pytest.approx(2e-6) and len(g) == 2001


def test_direct_construction_validated():
    with pytest.raises(SemanticError):
        PulseSequence((Mw(1, angle=1.0), Readout()))
    with pytest.raises(SemanticError):
        Mw(1)


# -- properties --------------------------------------------------------------

_num = st.floats(-720, 720, allow_nan=False).map(lambda x: round(x, 6))
_dur = st.floats(0, 5000, allow_nan=False).map(lambda x: round(x, 3))


@st.composite
def programs(draw):
    lines = ["init"]
    for _ in range(draw(st.integers(0, 6))):
        kind = draw(st.sampled_from(["mw_angle", "mw_dur", "wait", "init"]))
        ch = draw(st.sampled_from([1, 2]))
        if kind == "mw_angle":
            line = f"mw {ch} angle={draw(_num)} phase={draw(_num)}"
        elif kind == "mw_dur":
            line = f"mw {ch} dur={draw(_dur)} phase={draw(_num)}"
        elif kind == "wait":
            line = f"wait {draw(_dur)}"
        else:
            line = "init"
        if kind.startswith("mw") and draw(st.booleans()):
            line += f" detuning={draw(st.floats(-1e8, 1e8).map(lambda x: round(x, 1)))}"
        lines.append(line)
    lines.append(f"readout {draw(_dur)}")
    if draw(st.booleans()):
        lines.append(f"wait {draw(_dur)}")
        lines.append(f"readout {draw(_dur)}")
    return "\n".join(lines)


@settings(max_examples=200, deadline=None)
@given(programs())
def test_render_roundtrip(text):
    seq = parse_sequence(text)
    again = parse_sequence(render(seq))
    assert again.structurally_equal(seq)
    assert parse_sequence(render(again)).structurally_equal(again)


@settings(max_examples=500, deadline=None)
@given(st.binary(max_size=200))
def test_parse_never_crashes_on_bytes(data):
    try:
        parse_sequence(data)
    except SequenceError:
        pass


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="initmwaedrou 0123456789.=-#\n\tphasglcyfx", max_size=120))
def test_parse_never_crashes_on_text(text):
    try:
        parse_sequence(text)
    except SequenceError:
        pass
