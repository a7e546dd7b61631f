"""Contract synthesis by prompting a chat-completion language model.

The oracle drives a three-stage conversation: first it states the task and
the contract expression language, then it shows the procedure together with
the positive and negative transition examples and asks the model to reason
about the behavior, and finally it asks for a filled-in answer template

    PRECONDITION: <expr>
    POSTCONDITION: <expr>

The reply is parsed and type-checked against the procedure's interface
variables.  A reply that does not parse triggers a re-prompt carrying the
parser's error message, up to a retry cap; when the cap is exhausted the
oracle gives up with NoCandidate.  A contract returned from here is only
syntactically valid — whether it actually matches the examples is checked
by the caller.

Transports: `HttpTransport` talks to a live endpoint configured purely via
environment variables (COMPOVER_LLM_ENDPOINT, COMPOVER_LLM_MODEL and, for
the key, COMPOVER_LLM_API_KEY — never a project file).  `TranscriptTransport`
replays recorded replies in order for hermetic runs.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence, runtime_checkable

from ..il import Contract, IlError, VarContext, parse_expr
from .base import (
    ExamplePair,
    NoCandidate,
    ScriptExhausted,
    SynthBudget,
    TransportError,
)

ENDPOINT_VAR = "COMPOVER_LLM_ENDPOINT"
MODEL_VAR = "COMPOVER_LLM_MODEL"
API_KEY_VAR = "COMPOVER_LLM_API_KEY"

_PRE_LINE = re.compile(r"^\s*PRECONDITION\s*:\s*(.+?)\s*$", re.MULTILINE)
_POST_LINE = re.compile(r"^\s*POSTCONDITION\s*:\s*(.+?)\s*$", re.MULTILINE)


@runtime_checkable
class ChatTransport(Protocol):
    def complete(self, messages: Sequence[dict]) -> str: ...


class HttpTransport:
    """OpenAI-style chat-completion endpoint, configured from the environment."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str = "",
        timeout: float = 60.0,
    ):
        if not endpoint:
            raise TransportError("no LLM endpoint configured")
        self.endpoint = endpoint
        self.model = model
        self._api_key = api_key
        self.timeout = timeout

    @classmethod
    def from_env(cls, timeout: float = 60.0) -> "HttpTransport":
        endpoint = os.environ.get(ENDPOINT_VAR, "")
        if not endpoint:
            raise TransportError(f"{ENDPOINT_VAR} is not set")
        return cls(
            endpoint=endpoint,
            model=os.environ.get(MODEL_VAR, ""),
            api_key=os.environ.get(API_KEY_VAR, ""),
            timeout=timeout,
        )

    def complete(self, messages: Sequence[dict]) -> str:
        import httpx

        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        payload: dict = {"messages": list(messages)}
        if self.model:
            payload["model"] = self.model
        try:
            resp = httpx.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"LLM endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(
                f"LLM endpoint returned HTTP {resp.status_code}: {resp.text[:200]}"
            )
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise TransportError(f"malformed completion response: {exc}") from exc


class TranscriptTransport:
    """Replays recorded replies; records the requests it saw for inspection."""

    def __init__(self, replies: Sequence[str]):
        self._replies = list(replies)
        self._next = 0
        self.requests: list[list[dict]] = []

    @classmethod
    def from_file(cls, path: str) -> "TranscriptTransport":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if isinstance(doc, dict):
            doc = doc["replies"]
        replies = [r["reply"] if isinstance(r, dict) else str(r) for r in doc]
        return cls(replies)

    @property
    def remaining(self) -> int:
        return len(self._replies) - self._next

    def complete(self, messages: Sequence[dict]) -> str:
        self.requests.append(list(messages))
        if self._next >= len(self._replies):
            raise ScriptExhausted(
                f"transcript ran out of replies after {self._next} completions"
            )
        reply = self._replies[self._next]
        self._next += 1
        return reply


def _describe_type(t) -> str:
    if t.kind == "bool":
        return "bool"
    if t.kind == "record":
        inner = ", ".join(f"{n}: {_describe_type(ft)}" for n, ft in t.fields)
        return f"record {{{inner}}}"
    return f"{'s' if t.signed else 'u'}{t.width}"


def _language_primer() -> str:
    return (
        "Contracts are written in a small expression language over the "
        "procedure's variables. Available pieces:\n"
        "- boolean literals `true`/`false`; integer literals are decimal\n"
        "- `old(x)` means the value of `x` before the procedure ran; it is "
        "only allowed in the postcondition\n"
        "- comparisons `==`, `!=`, and ordered comparisons that spell out "
        "signedness: `<u`, `<=u`, `>u`, `>=u` for unsigned, `<s`, `<=s`, "
        "`>s`, `>=s` for signed\n"
        "- boolean connectives `!`, `&&`, `||`, `->` (implies)\n"
        "- wraparound arithmetic `+`, `-`, `*` on same-width integers\n"
        "- record fields are reached with a dot, e.g. `request.value`\n"
        "- conditional expressions `(if c then a else b)` need the parentheses "
        "when used inside a larger expression\n"
    )


def _render_pair(pair: ExamplePair) -> str:
    return f"{pair.pre} -> {pair.post}"


@dataclass
class LlmSynth:
    """SynthOracle backed by a chat transport."""

    transport: ChatTransport
    retries: int = 3
    system_note: str = ""
    log: list = field(default_factory=list)

    def synthesize(self, proc, positives, negatives, budget: SynthBudget) -> Contract:
        ctx: VarContext = proc.ctx
        messages = self._stage_one(proc, ctx)
        self.transport.complete(messages)
        messages.append({"role": "user", "content": self._stage_two(proc, positives, negatives)})
        self.transport.complete(messages)
        messages.append({"role": "user", "content": self._stage_three()})

        last_error = ""
        for _attempt in range(1 + max(0, self.retries)):
            reply = self.transport.complete(messages)
            self.log.append(reply)
            try:
                return self._parse_reply(reply, ctx)
            except IlError as exc:
                last_error = str(exc)
                messages.append({"role": "assistant", "content": reply})
                messages.append(
                    {
                        "role": "user",
                        "content": (
                            f"That answer did not parse: {last_error}\n"
                            "Reply again with exactly two lines, "
                            "`PRECONDITION: <expr>` and `POSTCONDITION: <expr>`."
                        ),
                    }
                )
        raise NoCandidate(f"model replies never parsed; last error: {last_error}")

    def _stage_one(self, proc, ctx: VarContext) -> list[dict]:
        vars_desc = "\n".join(
            f"- {name}: {_describe_type(ctx.type_of(name))}" for name in ctx.names()
        )
        content = (
            "You are helping verify a system made of several procedures. "
            "Your job is to summarize one procedure's behavior as a contract: "
            "a precondition on the state before the call and a postcondition "
            "relating the state before (via old(...)) and after the call.\n\n"
            f"{_language_primer()}\n"
            f"The procedure works on these variables:\n{vars_desc}\n\n"
            "Acknowledge and wait for the procedure."
        )
        if self.system_note:
            content = self.system_note + "\n\n" + content
        return [{"role": "user", "content": content}]

    def _stage_two(self, proc, positives, negatives) -> str:
        pos = "\n".join(f"  {_render_pair(p)}" for p in positives) or "  (none)"
        neg = "\n".join(f"  {_render_pair(p)}" for p in negatives) or "  (none)"
        from .enum_synth import _proc_text

        return (
            f"Here is the procedure `{getattr(proc, 'name', 'proc')}` "
            f"({getattr(proc, 'language', '?')}):\n\n"
            f"{_proc_text(proc)}\n\n"
            "Observed transitions the contract MUST allow "
            "(precondition holds on the left state implies postcondition holds "
            "on the pair):\n"
            f"{pos}\n"
            "Transitions the procedure can NEVER take; the contract must rule "
            "them out (precondition holds on the left state AND postcondition "
            "fails on the pair):\n"
            f"{neg}\n\n"
            "Think about what the code does and what stays unchanged. "
            "Describe the behavior in your own words first."
        )

    def _stage_three(self) -> str:
        return (
            "Now give the contract. Answer with exactly two lines and nothing "
            "else:\n"
            "PRECONDITION: <expression>\n"
            "POSTCONDITION: <expression>\n"
            "Prefer the weakest precondition (often just `true`) that still "
            "lets the postcondition hold."
        )

    def _parse_reply(self, reply: str, ctx: VarContext) -> Contract:
        pre_m = _PRE_LINE.search(reply)
        post_m = _POST_LINE.search(reply)
        if not pre_m or not post_m:
            from ..il.errors import IlSyntaxError

            raise IlSyntaxError(
                "reply must contain `PRECONDITION: ...` and `POSTCONDITION: ...` lines"
            )
        pre = parse_expr(pre_m.group(1), ctx, position="pre")
        post = parse_expr(post_m.group(1), ctx, position="post")
        contract = Contract(pre, post)
        contract.validate(ctx)
        return contract


def synthesize_llm(
    proc,
    positives,
    negatives,
    budget: SynthBudget,
    transport: ChatTransport,
    retries: int = 3,
) -> Contract:
    return LlmSynth(transport, retries=retries).synthesize(
        proc, positives, negatives, budget
    )
