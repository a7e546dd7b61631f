"""compover: compositional verification of polyglot state-machine systems.

Procedures written in different languages are abstracted by pre/post-condition
contracts in a small typed expression language. Contracts are synthesized from
examples, validated against the procedure with a per-language verifier, and the
contract-abstracted system is bounded-model-checked against a property. The
refinement loop returns either a bound-qualified proof or a concrete,
replayable counterexample trace.
"""

__version__ = "0.1.0"
