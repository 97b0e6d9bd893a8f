from agents import function_tool


@function_tool
def submit(answer: str) -> str:
    return answer
