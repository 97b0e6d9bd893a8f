from autogen import AssistantAgent


def make_assistant(config):
    return AssistantAgent(
        "writer",
        system_message="You write release notes.",
        llm_config=config,
    )
