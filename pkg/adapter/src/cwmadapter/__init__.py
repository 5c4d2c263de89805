"""Candidate adapter: hosts generated game-engine code behind the wire protocol.

One adapter process serves one candidate source file over stdio frames as
specified in docs/protocol.md. The adapter owns the candidate's states in
a handle table, probes apply_action for input mutation, canonicalizes
values for transport, and keeps native observation objects around so the
candidate's resampler sees its own objects rather than copies.
"""

__version__ = "0.1.0"
