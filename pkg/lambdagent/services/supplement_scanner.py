"""
Lexical scan of a repository's source code for values that supplement
lint-flagged config fields, and reconciliation of findings against it.

Extraction is line based: module-level constant assignments, keyword
arguments inside call parentheses, class attributes, and a table of
framework patterns. Expressions spanning several lines are not followed.

Python, JavaScript, TypeScript and Go sources are scanned with the same
patterns. Outside Python a declaration keyword may precede an assignment
(``const``, ``let``, ``var``, ``:=``) and ``name: value`` inside call
parentheses counts as a keyword argument, which covers option objects
such as ``new ChatOpenAI({ modelName: "gpt-4o" })``.
"""

import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from lambdagent.models.schemas import (
    LintFinding,
    PatternKind,
    Severity,
    SupplementHit,
    SupplementIndex,
)
from lambdagent.services.frameworks import normalize
from lambdagent.services.lint_engine import lint
from lambdagent.services.loader import load_document

logger = logging.getLogger(__name__)

SOURCE_EXTENSIONS = {".py", ".js", ".mjs", ".ts", ".go"}
COMMENT_PREFIXES = ("#", "//")

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_LITERAL = r"(?:[rRuUbBfF]{0,2}(?:\"\"\"|'''|\"[^\"]+|'[^']+)|`[^`]+|-?\d[\d_.]*|(?:True|False|true|false)\b)"
_DECLARATION = r"(?:(?:export\s+)?(?:const|let|var)\s+)?"
_ASSIGNMENT = re.compile(
    rf"^(?P<indent>\s*){_DECLARATION}(?P<name>{_IDENT})\s*(?::[^=]+)?:?=(?!=)\s*(?P<value>{_LITERAL}.*)$"
)
_KWARG = re.compile(rf"\b(?P<name>{_IDENT})\s*=(?!=)\s*(?P<value>[^,()\n]+)")
_FIELD = re.compile(rf"\b(?P<name>{_IDENT})\s*(?:=(?!=)|:(?!=))\s*(?P<value>[^,(){{}}\n]+)")
_BLOCK = re.compile(r"^(?P<indent>\s*)(?P<kind>class|def|async\s+def)\b")
_STRING = re.compile(r"\"(?:\\.|[^\"\\])*\"|'(?:\\.|[^'\\])*'|`[^`]*`")

# Extensible: pattern kind -> regexes recognised on a single line.
PATTERN_TABLE: Dict[PatternKind, List[re.Pattern]] = {
    PatternKind.CHAT_MODEL_CONSTRUCTOR: [
        re.compile(r"\b(?:Azure)?ChatOpenAI\s*\("),
        re.compile(r"\bChat(?:Anthropic|Ollama|GoogleGenerativeAI|MistralAI|Groq|Bedrock|Cohere)\s*\("),
        re.compile(r"\bOpenAIChatCompletionClient\s*\("),
        re.compile(r"\bLLM\s*\(\s*model\s*="),
    ],
    PatternKind.TERMINATION_MSG_ARG: [
        re.compile(r"\bis_termination_msg\s*="),
    ],
    PatternKind.TOOL_DECORATOR: [
        re.compile(r"^\s*@(?:tool|function_tool|register_function)\b"),
    ],
}

PROMPT_NAMES = {"systemprompt", "systemmessage", "prompt", "instructions", "instruction", "backstory", "prefix"}
MODEL_NAMES = {"model", "modelname", "llm", "deployment", "deploymentname", "engine", "modelid"}
ITERATION_NAMES = {
    "maxiter", "maxiterations", "maxsteps", "maxturns", "maxround", "maxrounds", "maxconsecutiveautoreply",
}


def normalize_name(name: str) -> str:
    """systemPrompt, system_prompt and SYSTEM_PROMPT all normalize to ``systemprompt``."""
    return name.replace("_", "").lower()


def is_prompt_name(key: str) -> bool:
    return key in PROMPT_NAMES or key.endswith("prompt")


def is_model_name(key: str) -> bool:
    return key in MODEL_NAMES or key.endswith("modelname") or key.endswith("model")


def is_iteration_name(key: str) -> bool:
    return key in ITERATION_NAMES


def _blank_strings(text: str) -> str:
    """Replace string contents so parentheses inside them are not counted."""
    return _STRING.sub(lambda m: m.group(0)[0] + "x" * (len(m.group(0)) - 2) + m.group(0)[-1], text)


def _useful(value: str) -> bool:
    value = value.strip()
    return value not in ("", "None", '""', "''")


class _FileScan:
    def __init__(self, path: Path, display: str):
        self.path = path
        self.display = display
        self.keyword = _KWARG if path.suffix == ".py" else _FIELD
        self.constants: Dict[str, List[SupplementHit]] = {}
        self.kwargs: Dict[str, List[SupplementHit]] = {}
        self.attributes: Dict[str, List[SupplementHit]] = {}
        self.patterns: Dict[PatternKind, List[SupplementHit]] = {}

    def hit(self, name: str, snippet: str, line: int) -> SupplementHit:
        return SupplementHit(name=name, snippet=snippet.strip()[:120], file=self.display, line=line)

    def run(self, text: str) -> "_FileScan":
        depth = 0
        blocks: List[Tuple[int, str]] = []
        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith(COMMENT_PREFIXES):
                continue
            indent = len(line) - len(line.lstrip())
            if depth == 0:
                while blocks and blocks[-1][0] >= indent:
                    blocks.pop()
                self.assignment(line, indent, blocks, number)
                block = _BLOCK.match(line)
                if block is not None:
                    blocks.append((indent, "class" if block.group("kind") == "class" else "def"))
            depth = self.keyword_args(line, depth, number)
            for kind, regexes in PATTERN_TABLE.items():
                if any(r.search(line) for r in regexes):
                    self.patterns.setdefault(kind, []).append(self.hit(kind.value, line, number))
        return self

    def assignment(self, line: str, indent: int, blocks: List[Tuple[int, str]], number: int) -> None:
        match = _ASSIGNMENT.match(line)
        if match is None:
            return
        key = normalize_name(match.group("name"))
        if indent == 0:
            self.constants.setdefault(key, []).append(self.hit(match.group("name"), line, number))
        elif blocks and blocks[-1][1] == "class":
            self.attributes.setdefault(key, []).append(self.hit(match.group("name"), line, number))

    def keyword_args(self, line: str, depth: int, number: int) -> int:
        blank = _blank_strings(line)
        for match in self.keyword.finditer(blank):
            prefix = blank[: match.start()]
            level = depth + prefix.count("(") - prefix.count(")")
            if level > 0 and _useful(line[match.start("value"): match.end("value")]):
                key = normalize_name(match.group("name"))
                self.kwargs.setdefault(key, []).append(self.hit(match.group("name"), line, number))
        return max(0, depth + blank.count("(") - blank.count(")"))


def _merge(target: Dict, source: Mapping) -> None:
    for key, hits in source.items():
        target.setdefault(key, []).extend(hits)


def _sorted(table: Dict) -> Dict:
    return {key: sorted(hits, key=lambda h: (h.file, h.line)) for key, hits in sorted(table.items(), key=lambda kv: str(kv[0]))}


def _scan_file(path: Path, root: Path) -> Union[_FileScan, str]:
    display = path.relative_to(root).as_posix() if path != root else path.name
    try:
        text = path.read_text(encoding="utf-8", errors="replace")
    except OSError as e:
        logger.warning("cannot read %s: %s", path, e)
        return f"{display}: {e}"
    return _FileScan(path, display).run(text)


def scan_repo(root: Union[str, os.PathLike], workers: int = 4) -> SupplementIndex:
    """Index the supplementing definitions in every source file under ``root``."""
    root = Path(root)
    if root.is_file():
        files = [root]
        base = root.parent
    elif root.is_dir():
        files = sorted(p for p in root.rglob("*") if p.is_file() and p.suffix in SOURCE_EXTENSIONS)
        base = root
    else:
        return SupplementIndex(errors=[f"{root}: not a file or directory"])
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda p: _scan_file(p, base), files))
    constants: Dict = {}
    kwargs: Dict = {}
    attributes: Dict = {}
    patterns: Dict = {}
    errors: List[str] = []
    for result in results:
        if isinstance(result, str):
            errors.append(result)
            continue
        _merge(constants, result.constants)
        _merge(kwargs, result.kwargs)
        _merge(attributes, result.attributes)
        _merge(patterns, result.patterns)
    logger.debug("scanned %d files under %s", len(files), root)
    return SupplementIndex(
        constant_assignments=_sorted(constants),
        call_keyword_args=_sorted(kwargs),
        class_attributes=_sorted(attributes),
        framework_patterns=_sorted(patterns),
        errors=sorted(errors),
    )


def _named(index: SupplementIndex, accept) -> List[SupplementHit]:
    hits: List[SupplementHit] = []
    for table in (index.constant_assignments, index.call_keyword_args, index.class_attributes):
        for key, entries in table.items():
            if accept(key):
                hits.extend(entries)
    return hits


def _patterns(index: SupplementIndex, *kinds: PatternKind) -> List[SupplementHit]:
    return [hit for kind in kinds for hit in index.framework_patterns.get(kind, [])]


def supplement_for(rule_id: str, index: SupplementIndex) -> Optional[SupplementHit]:
    """First (by file and line) supplementing definition for a finding's field."""
    if rule_id == "L001":
        hits = _named(index, is_prompt_name)
    elif rule_id == "L002":
        hits = _named(index, is_model_name) + _patterns(index, PatternKind.CHAT_MODEL_CONSTRUCTOR)
    elif rule_id == "L004a":
        hits = _patterns(index, PatternKind.TERMINATION_MSG_ARG, PatternKind.TOOL_DECORATOR)
    elif rule_id == "L017":
        hits = _named(index, is_iteration_name)
    else:
        return None
    return min(hits, key=lambda h: (h.file, h.line), default=None)


def reconcile(findings: Sequence[LintFinding], index: SupplementIndex) -> List[LintFinding]:
    """Downgrade findings whose field is supplied by code to INFO; never adds or upgrades."""
    result = []
    for finding in findings:
        hit = None if finding.severity == Severity.INFO else supplement_for(finding.rule_id, index)
        if hit is None:
            result.append(finding)
            continue
        result.append(finding.model_copy(update={
            "severity": Severity.INFO,
            "mitigation": f"supplied by code: {hit.name} at {hit.location}",
        }))
    result.sort(key=LintFinding.sort_key)
    return result


class JointCase(BaseModel):
    case_id: str
    rule_id: str
    genuine: bool
    yaml_flagged: bool
    joint_flagged: bool
    mitigation: Optional[str] = None


class JointReport(BaseModel):
    cases: List[JointCase]
    yaml_flagged: int
    yaml_true: int
    joint_flagged: int
    joint_true: int
    planted_false_positives: int
    downgraded_false_positives: int

    @property
    def yaml_precision(self) -> float:
        return self.yaml_true / self.yaml_flagged if self.yaml_flagged else 1.0

    @property
    def joint_precision(self) -> float:
        return self.joint_true / self.joint_flagged if self.joint_flagged else 1.0

    def render(self) -> str:
        return "\n".join([
            f"YAML-only precision  {self.yaml_true}/{self.yaml_flagged} = {100 * self.yaml_precision:.1f}%",
            f"joint precision      {self.joint_true}/{self.joint_flagged} = {100 * self.joint_precision:.1f}%",
            f"false positives downgraded {self.downgraded_false_positives}/{self.planted_false_positives}",
        ])


def joint_precision(cases: Iterable[Tuple[str, str, bool, Sequence[LintFinding], SupplementIndex]]) -> JointReport:
    """Score YAML-only and joint analysis over labelled cases.

    Each case is ``(case_id, rule_id, genuine, findings, index)``: the rule
    the case was sampled for, whether the finding is a real defect, the
    YAML-only findings and the index of the case's code.
    """
    rows: List[JointCase] = []
    for case_id, rule_id, genuine, findings, index in cases:
        before = [f for f in findings if f.rule_id == rule_id and f.severity == Severity.ERROR]
        reconciled = reconcile(before, index)
        after = [f for f in reconciled if f.severity == Severity.ERROR]
        mitigation = next((f.mitigation for f in reconciled if f.severity == Severity.INFO), None)
        rows.append(JointCase(
            case_id=case_id,
            rule_id=rule_id,
            genuine=genuine,
            yaml_flagged=bool(before),
            joint_flagged=bool(after),
            mitigation=mitigation,
        ))
    planted = [r for r in rows if r.yaml_flagged and not r.genuine]
    return JointReport(
        cases=rows,
        yaml_flagged=sum(r.yaml_flagged for r in rows),
        yaml_true=sum(r.yaml_flagged and r.genuine for r in rows),
        joint_flagged=sum(r.joint_flagged for r in rows),
        joint_true=sum(r.joint_flagged and r.genuine for r in rows),
        planted_false_positives=len(planted),
        downgraded_false_positives=sum(not r.joint_flagged for r in planted),
    )


def load_joint_cases(root: Union[str, os.PathLike], workers: int = 1):
    """Labelled cases from a fixture directory with a ``manifest.yaml``.

    Each manifest entry names a case directory holding ``agent.yaml`` and a
    ``code/`` tree; the entry's ``rule`` and ``genuine`` fields label it.
    """
    root = Path(root)
    manifest = load_document(root / "manifest.yaml")
    cases = []
    for entry in manifest.get("cases") or []:
        case_dir = root / str(entry["id"])
        config = normalize(load_document(case_dir / "agent.yaml"), source_path=str(case_dir / "agent.yaml"))
        index = scan_repo(case_dir / "code", workers)
        cases.append((str(entry["id"]), str(entry["rule"]), bool(entry["genuine"]), lint(config), index))
    return cases
