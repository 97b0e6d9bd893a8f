"""
Framework detection and normalization of raw agent documents.

Detection checks a fixed sequence of rules and the first match wins:
CrewAI, AutoGen, Dify, MultiAgent, LangChain, Lambdagent, then Generic.
"""

import logging
import re
from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import ValidationError

from lambdagent.core.errors import NormalizationError
from lambdagent.models.schemas import (
    AgentType,
    CanonicalConfig,
    FrameworkKind,
    HintKind,
    MemorySpec,
    ModelSpec,
    OnlineTools,
    RouteTable,
    TerminationHint,
    dedupe_hints,
)

logger = logging.getLogger(__name__)

CREWAI_KEYS = {"role", "goal", "backstory"}
TURN_KEYS = {
    "max_turns",
    "max_round",
    "max_rounds",
    "speaker_selection_method",
    "speaker_selection",
    "allow_repeat_speaker",
    "turn_order",
    "group_chat",
    "groupchat",
}
DIFY_NODE_TYPES = {"start", "llm", "tool", "if-else", "iteration", "end", "answer"}
PROMPT_KEYS = ("systemPrompt", "system_prompt", "system_message", "prompt", "instructions", "prefix")
MODEL_KEYS = ("model", "llm", "model_name")
_AGENT_TYPES = {t.value for t in AgentType}


def _hint(kind: HintKind, value: Optional[int] = None) -> TerminationHint:
    return TerminationHint(kind=kind, value=value)


def _is_crewai_agent(doc: Any) -> bool:
    return isinstance(doc, Mapping) and CREWAI_KEYS <= set(doc)


def _dify_nodes(doc: Mapping) -> Optional[List[Mapping]]:
    graph = doc.get("graph")
    if graph is None and isinstance(doc.get("workflow"), Mapping):
        graph = doc["workflow"].get("graph")
    nodes = graph.get("nodes") if isinstance(graph, Mapping) else doc.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        return None
    if all(isinstance(n, Mapping) and _dify_type(n) for n in nodes):
        return nodes
    return None


def _dify_type(node: Mapping) -> Optional[str]:
    data = node.get("data") if isinstance(node.get("data"), Mapping) else {}
    kind = data.get("type", node.get("type"))
    return str(kind) if kind else None


def detect_framework(raw: Any) -> FrameworkKind:
    """Classify a parsed document; a non-mapping root is Generic."""
    if not isinstance(raw, Mapping):
        return FrameworkKind.GENERIC
    keys = set(raw)
    if CREWAI_KEYS <= keys:
        return FrameworkKind.CREWAI
    if raw and all(_is_crewai_agent(v) for v in raw.values()):
        return FrameworkKind.CREWAI
    if "is_termination_msg" in keys or "llm_config" in keys:
        return FrameworkKind.AUTOGEN
    if _dify_nodes(raw) is not None:
        return FrameworkKind.DIFY
    if isinstance(raw.get("agents"), list) and keys & TURN_KEYS:
        return FrameworkKind.MULTI_AGENT
    if "_type" in keys or "agent_type" in keys:
        return FrameworkKind.LANGCHAIN
    if "agentId" in keys and "type" in keys:
        return FrameworkKind.LAMBDAGENT
    return FrameworkKind.GENERIC


def normalize(raw: Any, kind: Optional[FrameworkKind] = None, source_path: str = "") -> CanonicalConfig:
    """Map a raw document of framework ``kind`` onto a CanonicalConfig."""
    if isinstance(raw, CanonicalConfig):
        return raw
    if not isinstance(raw, Mapping):
        raise NormalizationError(f"{source_path or 'document'}: root must be a mapping, got {type(raw).__name__}")
    kind = kind or detect_framework(raw)
    logger.debug("normalizing %s as %s", source_path or "<document>", kind.value)
    handler = _HANDLERS[kind]
    try:
        config = handler(raw, source_path)
    except ValidationError as e:
        raise NormalizationError(f"{source_path or 'document'}: {e.errors()[0]['msg']}") from e
    except (TypeError, ValueError, AttributeError) as e:
        raise NormalizationError(f"{source_path or 'document'}: malformed {kind.value} document: {e}") from e
    return config


def _model(value: Any, temperature: Any = None) -> Optional[ModelSpec]:
    if value is None or value == "":
        return None
    if isinstance(value, str):
        return ModelSpec(name=value, temperature=float(temperature or 0.0))
    if isinstance(value, Mapping):
        name = value.get("name") or value.get("model") or value.get("model_name") or value.get("deployment")
        if not name and isinstance(value.get("config_list"), list) and value["config_list"]:
            name = value["config_list"][0].get("model")
        if not name:
            return None
        temp = value.get("temperature")
        if temp is None and isinstance(value.get("completion_params"), Mapping):
            temp = value["completion_params"].get("temperature")
        if temp is None:
            temp = temperature
        return ModelSpec(name=str(name), temperature=float(temp or 0.0))
    raise ValueError(f"cannot read a model from {value!r}")


def _tool_names(value: Any) -> List[str]:
    names = []
    for item in value or []:
        if isinstance(item, str):
            names.append(item)
        elif isinstance(item, Mapping):
            name = item.get("name") or item.get("tool_name") or item.get("id")
            if name:
                names.append(str(name))
    return names


def _first(doc: Mapping, keys) -> Any:
    for key in keys:
        if key in doc and doc[key] is not None:
            return doc[key]
    return None


def _prompt(doc: Mapping) -> Optional[str]:
    value = _first(doc, PROMPT_KEYS)
    if isinstance(value, Mapping):
        value = value.get("template")
    return str(value) if value is not None else None


def _extras(doc: Mapping, used) -> Dict[str, Any]:
    return {k: v for k, v in doc.items() if k not in used}


_HINT = re.compile(r"^(\w+)(?:\((\d+)\))?$")


def parse_hint(text: str) -> TerminationHint:
    match = _HINT.match(text.strip())
    if match is None:
        raise ValueError(f"bad termination hint {text!r}")
    value = int(match.group(2)) if match.group(2) is not None else None
    return _hint(HintKind(match.group(1)), value)


# Lambdagent native documents

_LAMBDAGENT_KEYS = {
    "agentId", "type", "model", "systemPrompt", "react", "maxSteps", "mcp", "tools", "memory", "guard",
    "condition", "stages", "branches", "routes", "body", "groupChat", "terminationHints", "framework",
    "sourcePath", "extras",
}


def _normalize_lambdagent(doc: Mapping, source_path: str, agent_id: str = "agent") -> CanonicalConfig:
    try:
        agent_type = AgentType(doc.get("type", "simple"))
    except ValueError:
        raise NormalizationError(f"{source_path or agent_id}: unknown agent type {doc.get('type')!r}") from None
    react = doc.get("react") or {}
    max_steps = react.get("maxSteps") if isinstance(react, Mapping) else None
    if max_steps is None:
        max_steps = doc.get("maxSteps")
    mcp = doc.get("mcp") or {}
    online = [
        OnlineTools(server=str(server), tools=_tool_names(tools))
        for server, tools in (mcp.get("onlineTool") or {}).items()
    ]
    local = _tool_names(mcp.get("localTools")) + _tool_names(doc.get("tools"))
    my_id = str(doc.get("agentId", agent_id))

    def sub(value: Any, suffix: str) -> CanonicalConfig:
        return _sub_config(value, f"{my_id}.{suffix}")

    routes = None
    if doc.get("routes") is not None:
        table = doc["routes"]
        if not isinstance(table, Mapping):
            raise NormalizationError(f"{source_path or my_id}: routes must be a mapping")
        routes = RouteTable(
            labeled={str(k): sub(v, str(k)) for k, v in table.items() if k != "default"},
            default=sub(table["default"], "default") if table.get("default") is not None else None,
        )
    memory = doc.get("memory")
    framework = FrameworkKind.parse(doc["framework"]) if doc.get("framework") else FrameworkKind.LAMBDAGENT
    extras = dict(doc.get("extras") or {})
    extras.update(_extras(doc, _LAMBDAGENT_KEYS))
    return CanonicalConfig(
        agent_id=my_id,
        agent_type=agent_type,
        model=_model(doc.get("model")),
        system_prompt=doc.get("systemPrompt"),
        max_steps=max_steps,
        tools=local,
        online_tools=online,
        routes=routes,
        condition=doc.get("condition"),
        stages=[sub(s, f"stages[{i}]") for i, s in enumerate(doc["stages"])] if doc.get("stages") is not None else None,
        branches=[sub(b, f"branches[{i}]") for i, b in enumerate(doc["branches"])] if doc.get("branches") is not None else None,
        body=sub(doc["body"], "body") if doc.get("body") is not None else None,
        memory=MemorySpec(**memory) if isinstance(memory, Mapping) else None,
        guard=doc.get("guard"),
        group_chat=bool(doc.get("groupChat", False)),
        termination_hints=[parse_hint(h) for h in doc.get("terminationHints") or []],
        framework=framework,
        source_path=str(doc.get("sourcePath", source_path)),
        extras=extras,
    )


def _sub_config(value: Any, agent_id: str) -> CanonicalConfig:
    if isinstance(value, CanonicalConfig):
        return value
    if not isinstance(value, Mapping):
        raise NormalizationError(f"{agent_id}: sub-agent must be a mapping")
    kind = detect_framework(value)
    if kind in (FrameworkKind.LAMBDAGENT, FrameworkKind.GENERIC) and value.get("type") in _AGENT_TYPES:
        return _normalize_lambdagent(value, "", agent_id)
    config = _HANDLERS[kind](value, "")
    if config.agent_id == "agent":
        config = config.model_copy(update={"agent_id": agent_id})
    return config


# CrewAI

def _crewai_agent(doc: Mapping, agent_id: str, source_path: str) -> CanonicalConfig:
    parts = [str(doc.get(k)).strip() for k in ("role", "goal", "backstory") if doc.get(k)]
    tools = _tool_names(doc.get("tools"))
    hints = [_hint(HintKind.FRAMEWORK_INTERNAL)]
    max_steps = None
    if doc.get("max_iter") is not None:
        max_steps = int(doc["max_iter"])
        hints.append(_hint(HintKind.MAX_ITER, max_steps))
    if doc.get("allow_delegation") is False:
        hints.append(_hint(HintKind.NO_DELEGATION))
    return CanonicalConfig(
        agent_id=str(doc.get("name", agent_id)),
        agent_type=AgentType.REACT if tools else AgentType.SIMPLE,
        model=_model(doc.get("llm")),
        system_prompt="\n".join(parts),
        max_steps=max_steps,
        tools=tools,
        termination_hints=hints,
        framework=FrameworkKind.CREWAI,
        source_path=source_path,
        extras=_extras(doc, {"role", "goal", "backstory", "tools", "llm", "max_iter", "allow_delegation", "name"}),
    )


def _normalize_crewai(doc: Mapping, source_path: str) -> CanonicalConfig:
    if CREWAI_KEYS <= set(doc):
        return _crewai_agent(doc, _stem(source_path), source_path)
    agents = [_crewai_agent(agent, str(name), source_path) for name, agent in doc.items()]
    if len(agents) == 1:
        return agents[0]
    return CanonicalConfig(
        agent_id=_stem(source_path),
        agent_type=AgentType.CHAIN,
        stages=agents,
        framework=FrameworkKind.CREWAI,
        source_path=source_path,
    )


def _stem(source_path: str) -> str:
    if not source_path:
        return "agent"
    name = source_path.replace("\\", "/").rsplit("/", 1)[-1]
    return name.rsplit(".", 1)[0] or "agent"


# LangChain

def _normalize_langchain(doc: Mapping, source_path: str) -> CanonicalConfig:
    tools = _tool_names(doc.get("tools"))
    kind = str(doc.get("_type") or doc.get("agent_type") or "")
    hints = [_hint(HintKind.FRAMEWORK_INTERNAL)]
    max_steps = doc.get("max_iterations")
    if max_steps is not None:
        max_steps = int(max_steps)
        hints.append(_hint(HintKind.MAX_ITER, max_steps))
    llm = doc.get("llm")
    return CanonicalConfig(
        agent_id=str(doc.get("name", _stem(source_path))),
        agent_type=AgentType.REACT if tools or "react" in kind else AgentType.SIMPLE,
        model=_model(llm if llm is not None else doc.get("model")),
        system_prompt=_prompt(doc),
        max_steps=max_steps,
        tools=tools,
        termination_hints=hints,
        framework=FrameworkKind.LANGCHAIN,
        source_path=source_path,
        extras=_extras(doc, {"tools", "_type", "agent_type", "max_iterations", "llm", "model", "name", *PROMPT_KEYS}),
    )


# AutoGen and generic multi-agent group chats

def _group_chat(doc: Mapping, source_path: str, framework: FrameworkKind) -> CanonicalConfig:
    members: Dict[str, CanonicalConfig] = {}
    for i, member in enumerate(doc.get("agents") or []):
        if not isinstance(member, Mapping):
            raise NormalizationError(f"{source_path or 'document'}: agents[{i}] must be a mapping")
        name = str(member.get("name") or member.get("agentId") or f"agent{i}")
        members[name] = _sub_config(member, name)
    manager = doc.get("manager") if isinstance(doc.get("manager"), Mapping) else {}
    bound = _first(doc, ("max_round", "max_rounds", "max_turns"))
    hints = []
    if bound is not None:
        bound = int(bound)
        hints.append(_hint(HintKind.MAX_ROUNDS, bound))
    if doc.get("is_termination_msg") is not None:
        hints.append(_hint(HintKind.IS_TERMINATION_MSG))
    used = {"agents", "manager", "max_round", "max_rounds", "max_turns", "is_termination_msg", "name",
            "llm_config", "selector_prompt", *PROMPT_KEYS, *MODEL_KEYS}
    model_source = _first(doc, MODEL_KEYS) or doc.get("llm_config") or _first(manager, ("model", "llm", "llm_config"))
    prompt = doc.get("selector_prompt") or _prompt(doc) or _prompt(manager)
    return CanonicalConfig(
        agent_id=str(doc.get("name", _stem(source_path))),
        agent_type=AgentType.ROUTER,
        model=_model(model_source),
        system_prompt=prompt,
        max_steps=bound,
        routes=RouteTable(labeled=members),
        group_chat=True,
        termination_hints=hints,
        framework=framework,
        source_path=source_path,
        extras=_extras(doc, used),
    )


def _normalize_autogen(doc: Mapping, source_path: str) -> CanonicalConfig:
    if isinstance(doc.get("agents"), list):
        return _group_chat(doc, source_path, FrameworkKind.AUTOGEN)
    llm_config = doc.get("llm_config")
    tools = _tool_names(doc.get("tools")) + _tool_names(doc.get("functions"))
    if isinstance(llm_config, Mapping):
        tools += _tool_names(llm_config.get("functions")) + _tool_names(llm_config.get("tools"))
    hints = []
    if doc.get("is_termination_msg") is not None:
        hints.append(_hint(HintKind.IS_TERMINATION_MSG))
    max_steps = doc.get("max_consecutive_auto_reply")
    if max_steps is not None:
        max_steps = int(max_steps)
        hints.append(_hint(HintKind.MAX_ITER, max_steps))
    return CanonicalConfig(
        agent_id=str(doc.get("name", _stem(source_path))),
        agent_type=AgentType.REACT if tools else AgentType.SIMPLE,
        model=_model(llm_config if llm_config not in (None, False) else doc.get("model")),
        system_prompt=_prompt(doc),
        max_steps=max_steps,
        tools=tools,
        termination_hints=hints,
        framework=FrameworkKind.AUTOGEN,
        source_path=source_path,
        extras=_extras(doc, {"name", "llm_config", "tools", "functions", "is_termination_msg",
                            "max_consecutive_auto_reply", "model", *PROMPT_KEYS}),
    )


def _normalize_multi_agent(doc: Mapping, source_path: str) -> CanonicalConfig:
    return _group_chat(doc, source_path, FrameworkKind.MULTI_AGENT)


# Dify workflows

def _dify_condition(data: Mapping) -> Any:
    parts = []
    for cond in data.get("conditions") or []:
        op = str(cond.get("comparison_operator", "not empty")).lower()
        value = re.escape(str(cond.get("value", "")))
        if op == "contains":
            parts.append({"matches": value})
        elif op == "not contains":
            parts.append({"not": {"matches": value}})
        elif op in ("start with", "starts with"):
            parts.append({"matches": f"^{value}"})
        elif op in ("end with", "ends with"):
            parts.append({"matches": f"{value}$"})
        elif op in ("is", "="):
            parts.append({"matches": f"^{value}$"})
        elif op == "empty":
            parts.append({"not": "nonEmpty"})
        else:
            parts.append("nonEmpty")
    if not parts:
        return "nonEmpty"
    if str(data.get("logical_operator", "and")).lower() == "or":
        return {"not": {"and": [{"not": p} for p in parts]}}
    return parts[0] if len(parts) == 1 else {"and": parts}


class _DifyGraph:
    def __init__(self, nodes: List[Mapping], edges: List[Mapping]):
        self.nodes = {str(n.get("id")): n for n in nodes}
        self.order = [str(n.get("id")) for n in nodes]
        self.edges = edges
        self.saw_end = False

    def successors(self, node_id: str, handle: Optional[str] = None) -> List[str]:
        targets = []
        for edge in self.edges:
            if str(edge.get("source")) != node_id:
                continue
            if handle is not None and str(edge.get("sourceHandle", "")) != handle:
                continue
            targets.append(str(edge.get("target")))
        return targets

    def parent(self, node_id: str) -> Optional[str]:
        node = self.nodes[node_id]
        data = node.get("data") if isinstance(node.get("data"), Mapping) else {}
        parent = node.get("parentId") or data.get("iteration_id")
        return str(parent) if parent else None

    def entry(self, parent: Optional[str]) -> Optional[str]:
        candidates = [n for n in self.order if self.parent(n) == parent]
        targets = {str(e.get("target")) for e in self.edges}
        for node_id in candidates:
            if _dify_type(self.nodes[node_id]) == "start":
                return node_id
        for node_id in candidates:
            if node_id not in targets:
                return node_id
        return candidates[0] if candidates else None

    def walk(self, node_id: Optional[str], seen: Tuple[str, ...] = ()) -> List[CanonicalConfig]:
        """Stages from ``node_id`` along the edges until an end node or a dead end."""
        stages: List[CanonicalConfig] = []
        while node_id is not None and node_id not in seen:
            seen = seen + (node_id,)
            node = self.nodes.get(node_id)
            if node is None:
                raise ValueError(f"edge to unknown node {node_id!r}")
            kind = _dify_type(node)
            data = node.get("data") if isinstance(node.get("data"), Mapping) else {}
            title = str(data.get("title") or node_id)
            if kind in ("end", "answer"):
                self.saw_end = True
                break
            if kind == "if-else":
                routes = {
                    label: _stage_of(self.walk(next(iter(self.successors(node_id, handle)), None), seen), title)
                    for label, handle in (("then", "true"), ("else", "false"))
                }
                stages.append(CanonicalConfig(
                    agent_id=title,
                    agent_type=AgentType.ROUTER,
                    condition=_dify_condition(data),
                    routes=RouteTable(labeled=routes),
                    framework=FrameworkKind.DIFY,
                ))
                break
            if kind == "llm":
                stages.append(_dify_llm(data, title))
            elif kind == "tool":
                name = data.get("tool_name") or data.get("tool_label") or title
                stages.append(CanonicalConfig(
                    agent_id=title, agent_type=AgentType.TOOL, tools=[str(name)], framework=FrameworkKind.DIFY,
                ))
            elif kind == "iteration":
                body = self.walk(self.entry(node_id), seen)
                bound = data.get("max_iterations", data.get("iterations"))
                stages.append(CanonicalConfig(
                    agent_id=title,
                    agent_type=AgentType.LOOP,
                    max_steps=int(bound) if bound is not None else None,
                    body=_stage_of(body, f"{title}.body"),
                    framework=FrameworkKind.DIFY,
                ))
            elif kind != "start":
                raise ValueError(f"unsupported Dify node type {kind!r}")
            nexts = self.successors(node_id)
            node_id = nexts[0] if nexts else None
        return stages


def _dify_llm(data: Mapping, title: str) -> CanonicalConfig:
    template = data.get("prompt_template")
    prompt = None
    if isinstance(template, list):
        system = [str(m.get("text", "")) for m in template if isinstance(m, Mapping) and m.get("role") == "system"]
        texts = system or [str(m.get("text", "")) for m in template if isinstance(m, Mapping)]
        prompt = "\n".join(texts)
    elif template is not None:
        prompt = str(template)
    elif data.get("prompt") is not None:
        prompt = str(data["prompt"])
    return CanonicalConfig(
        agent_id=title,
        agent_type=AgentType.SIMPLE,
        model=_model(data.get("model")),
        system_prompt=prompt,
        framework=FrameworkKind.DIFY,
    )


def _stage_of(stages: List[CanonicalConfig], agent_id: str) -> CanonicalConfig:
    if len(stages) == 1:
        return stages[0]
    if not stages:
        return CanonicalConfig(agent_id=agent_id, agent_type=AgentType.TOOL, tools=["terminate"],
                               framework=FrameworkKind.DIFY)
    return CanonicalConfig(agent_id=agent_id, agent_type=AgentType.CHAIN, stages=stages,
                           framework=FrameworkKind.DIFY)


def _normalize_dify(doc: Mapping, source_path: str) -> CanonicalConfig:
    nodes = _dify_nodes(doc) or []
    graph = doc.get("graph")
    if graph is None and isinstance(doc.get("workflow"), Mapping):
        graph = doc["workflow"].get("graph")
    edges = (graph.get("edges") if isinstance(graph, Mapping) else doc.get("edges")) or []
    for node in nodes:
        kind = _dify_type(node)
        if kind not in DIFY_NODE_TYPES:
            raise NormalizationError(f"{source_path or 'document'}: unsupported Dify node type {kind!r}")
    dag = _DifyGraph(nodes, edges)
    if not edges:
        # Without edges the node list order is the execution order within each parent.
        groups: Dict[Optional[str], List[str]] = {}
        for node_id in dag.order:
            groups.setdefault(dag.parent(node_id), []).append(node_id)
        dag.edges = [{"source": a, "target": b} for ids in groups.values() for a, b in zip(ids, ids[1:])]
    stages = dag.walk(dag.entry(None))
    app = doc.get("app") if isinstance(doc.get("app"), Mapping) else {}
    root = _stage_of(stages, str(app.get("name") or _stem(source_path)))
    hints = list(root.termination_hints)
    if dag.saw_end:
        hints.append(_hint(HintKind.DAG_END_NODE))
    return root.model_copy(update={
        "termination_hints": dedupe_hints(hints),
        "source_path": source_path,
        "framework": FrameworkKind.DIFY,
    })


# Generic documents

def _normalize_generic(doc: Mapping, source_path: str) -> CanonicalConfig:
    tools = _tool_names(doc.get("tools"))
    declared = doc.get("type") or doc.get("agent_type")
    try:
        agent_type = AgentType(declared) if declared else (AgentType.REACT if tools else AgentType.SIMPLE)
    except ValueError:
        agent_type = AgentType.REACT if tools else AgentType.SIMPLE
    hints = []
    max_steps = _first(doc, ("max_steps", "maxSteps"))
    max_iter = _first(doc, ("max_iter", "max_iterations"))
    if max_iter is not None:
        hints.append(_hint(HintKind.MAX_ITER, int(max_iter)))
        if max_steps is None:
            max_steps = max_iter
    return CanonicalConfig(
        agent_id=str(doc.get("name") or doc.get("id") or doc.get("agentId") or _stem(source_path)),
        agent_type=agent_type,
        model=_model(_first(doc, MODEL_KEYS), doc.get("temperature")),
        system_prompt=_prompt(doc),
        max_steps=int(max_steps) if max_steps is not None else None,
        tools=tools,
        termination_hints=hints,
        framework=FrameworkKind.GENERIC,
        source_path=source_path,
        extras=_extras(doc, {"name", "id", "agentId", "type", "agent_type", "tools", "max_steps", "maxSteps",
                            "max_iter", "max_iterations", "temperature", *PROMPT_KEYS, *MODEL_KEYS}),
    )


def _normalize_lambdagent_root(doc: Mapping, source_path: str) -> CanonicalConfig:
    return _normalize_lambdagent(doc, source_path)


_HANDLERS = {
    FrameworkKind.CREWAI: _normalize_crewai,
    FrameworkKind.LANGCHAIN: _normalize_langchain,
    FrameworkKind.AUTOGEN: _normalize_autogen,
    FrameworkKind.DIFY: _normalize_dify,
    FrameworkKind.MULTI_AGENT: _normalize_multi_agent,
    FrameworkKind.GENERIC: _normalize_generic,
    FrameworkKind.LAMBDAGENT: _normalize_lambdagent_root,
}


def to_document(c: CanonicalConfig) -> Dict[str, Any]:
    """Render a canonical config as a native document that normalizes back to ``c``."""
    doc: Dict[str, Any] = {"agentId": c.agent_id, "type": c.agent_type.value}
    if c.model is not None:
        doc["model"] = {"name": c.model.name, "temperature": c.model.temperature}
    if c.system_prompt is not None:
        doc["systemPrompt"] = c.system_prompt
    if c.max_steps is not None:
        doc["react"] = {"maxSteps": c.max_steps}
    mcp: Dict[str, Any] = {}
    if c.online_tools:
        mcp["onlineTool"] = {group.server: list(group.tools) for group in c.online_tools}
    if c.tools:
        mcp["localTools"] = list(c.tools)
    if mcp:
        doc["mcp"] = mcp
    if c.memory is not None:
        doc["memory"] = c.memory.model_dump()
    for key in ("guard", "condition"):
        if getattr(c, key) is not None:
            doc[key] = getattr(c, key)
    if c.stages is not None:
        doc["stages"] = [to_document(s) for s in c.stages]
    if c.branches is not None:
        doc["branches"] = [to_document(b) for b in c.branches]
    if c.routes is not None:
        routes = {label: to_document(r) for label, r in c.routes.labeled.items()}
        if c.routes.default is not None:
            routes["default"] = to_document(c.routes.default)
        doc["routes"] = routes
    if c.body is not None:
        doc["body"] = to_document(c.body)
    if c.group_chat:
        doc["groupChat"] = True
    if c.termination_hints:
        doc["terminationHints"] = [h.render() for h in c.termination_hints]
    doc["framework"] = c.framework.value
    if c.source_path:
        doc["sourcePath"] = c.source_path
    if c.extras:
        doc["extras"] = dict(c.extras)
    return doc
