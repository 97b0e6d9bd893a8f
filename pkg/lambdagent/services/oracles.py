"""
Oracle providers: the LLM behind every ``lam p θ`` term.

``ScriptedOracle`` is the deterministic test double used by the harnesses and
the CLI's ``--oracle-script`` flag; ``ExternalOracle`` talks to an
OpenAI-compatible endpoint or an Azure OpenAI deployment.
"""

import logging
import threading
from typing import Callable, Dict, Mapping, Optional, Protocol, Sequence, Tuple, runtime_checkable

from openai import AzureOpenAI, OpenAI

from lambdagent.core.config import Settings
from lambdagent.core.errors import ConfigLoadError, OracleError
from lambdagent.models.terms import ModelParams

logger = logging.getLogger(__name__)

WILDCARD = "*"

Responder = Callable[[str, str], Optional[str]]


@runtime_checkable
class OracleProvider(Protocol):
    def complete(self, prompt: str, params: ModelParams, input: str) -> str:
        ...


class ScriptedOracle:
    """Deterministic oracle answering from tables.

    Lookup order for a call ``(prompt, input)``:

    1. ``responses[(key, input)]`` then ``responses[(key, "*")]`` where ``key``
       is the prompt itself or, failing that, the longest scripted key the
       prompt starts with; then ``responses[("*", input)]`` and
       ``responses[("*", "*")]``
    2. the next entry of ``sequences[key]`` (the last entry repeats once the
       sequence is exhausted), then ``sequences["*"]``
    3. ``responder(prompt, input)`` when it returns a string
    4. ``default``

    Anything else raises ``OracleError``.
    """

    def __init__(
        self,
        responses: Optional[Mapping[Tuple[str, str], str]] = None,
        sequences: Optional[Mapping[str, Sequence[str]]] = None,
        default: Optional[str] = None,
        responder: Optional[Responder] = None,
    ):
        self.responses: Dict[Tuple[str, str], str] = dict(responses or {})
        self.sequences: Dict[str, Tuple[str, ...]] = {k: tuple(v) for k, v in (sequences or {}).items()}
        self.default = default
        self.responder = responder
        self._cursors: Dict[str, int] = {}
        self._lock = threading.Lock()
        self.calls = 0

    def _key(self, prompt: str, keys) -> Optional[str]:
        keys = set(keys)
        if prompt in keys:
            return prompt
        prefixes = [k for k in keys if k != WILDCARD and prompt.startswith(k)]
        if prefixes:
            return max(prefixes, key=lambda k: (len(k), k))
        return None

    def _next(self, key: str) -> str:
        outputs = self.sequences[key]
        i = self._cursors.get(key, 0)
        self._cursors[key] = i + 1
        return outputs[min(i, len(outputs) - 1)]

    def complete(self, prompt: str, params: ModelParams, input: str) -> str:
        with self._lock:
            self.calls += 1
            key = self._key(prompt, (p for p, _ in self.responses))
            if key is not None:
                for lookup in ((key, input), (key, WILDCARD)):
                    if lookup in self.responses:
                        return self.responses[lookup]
            for lookup in ((WILDCARD, input), (WILDCARD, WILDCARD)):
                if lookup in self.responses:
                    return self.responses[lookup]
            key = self._key(prompt, (k for k, v in self.sequences.items() if v))
            if key is not None:
                return self._next(key)
            if self.sequences.get(WILDCARD):
                return self._next(WILDCARD)
        if self.responder is not None:
            answer = self.responder(prompt, input)
            if answer is not None:
                return answer
        if self.default is not None:
            return self.default
        raise OracleError(f"no scripted response for prompt {prompt[:40]!r} and input {input[:40]!r}")

    def reset(self) -> None:
        with self._lock:
            self._cursors.clear()
            self.calls = 0

    @classmethod
    def from_document(cls, doc: Mapping) -> "ScriptedOracle":
        """Build from an oracle-script document (see README, "Oracle scripts")."""
        if not isinstance(doc, Mapping):
            raise ConfigLoadError("oracle script must be a mapping")
        responses: Dict[Tuple[str, str], str] = {}
        for i, row in enumerate(doc.get("responses") or []):
            try:
                responses[(str(row.get("prompt", WILDCARD)), str(row.get("input", WILDCARD)))] = str(row["output"])
            except (AttributeError, KeyError):
                raise ConfigLoadError(f"responses[{i}] needs an output") from None
        sequences = {str(k): [str(x) for x in v] for k, v in (doc.get("sequences") or {}).items()}
        default = doc.get("default")
        return cls(responses, sequences, str(default) if default is not None else None)


class ExternalOracle:
    """Oracle backed by an OpenAI-compatible chat completion endpoint."""

    def __init__(self, settings: Settings):
        if not settings.oracle_configured:
            raise OracleError("external oracle is not configured (set LAMBDAGENT_ORACLE_ENDPOINT and LAMBDAGENT_ORACLE_API_KEY)")
        self.settings = settings
        if settings.oracle_deployment_name:
            self.client = AzureOpenAI(
                api_key=settings.oracle_api_key,
                azure_endpoint=settings.oracle_endpoint,
                api_version=settings.oracle_api_version,
            )
        else:
            self.client = OpenAI(api_key=settings.oracle_api_key, base_url=settings.oracle_endpoint)
        logger.info("external oracle configured at %s", settings.oracle_endpoint)

    def complete(self, prompt: str, params: ModelParams, input: str) -> str:
        model = self.settings.oracle_deployment_name or params.model_name
        messages = [
            {"role": "system", "content": prompt},
            {"role": "user", "content": input},
        ]
        try:
            logger.debug("oracle request model=%s chars=%d", model, len(input))
            response = self.client.chat.completions.create(
                model=model,
                messages=messages,
                temperature=params.temperature,
                timeout=self.settings.oracle_timeout,
            )
            answer = response.choices[0].message.content or ""
        except Exception as e:
            logger.error("oracle request failed: %s", e)
            raise OracleError(f"oracle request failed: {e}") from e
        logger.debug("oracle answered %d characters", len(answer))
        return answer


def build_oracle(settings: Settings, script: Optional[Mapping] = None) -> OracleProvider:
    """A scripted oracle when a script is given, else the external endpoint."""
    if script is not None:
        return ScriptedOracle.from_document(script)
    if not settings.oracle_configured:
        logger.warning("no oracle script and no external endpoint; oracle calls will fail")
        return ScriptedOracle()
    return ExternalOracle(settings)
