"""Writing cloning programs in the .seq language and via presets.

A program is a list of ops: ``init``, ``mw <ch> angle=<deg>|dur=<ns> phase=<deg>``,
``wait <ns>`` and ``readout <ns>``. Parse errors carry line and column.
"""
from nvclone import SequenceError, parse_sequence, preset, render

text = """
# prepare (|0> + i|1>)/sqrt2 on the {|0>, |-1>} pair, then clone with MW2
init
mw 1 angle=90 phase=0
mw 2 angle=90 phase=0
readout 300
"""
seq = parse_sequence(text, name="clone")
print(render(seq))
print("same as preset:", seq.structurally_equal(preset("fig3a-clone")))

# The wait-time series inserts a free evolution between prep and cloning.
print(render(preset("fig5", j=5, dt=20e-9)))

try:
    parse_sequence("init\nmw 3 angle=90 phase=0\nreadout 300")
except SequenceError as exc:
    print("rejected:", exc)
