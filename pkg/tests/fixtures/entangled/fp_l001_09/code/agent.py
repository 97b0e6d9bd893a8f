REVIEW_PROMPT = """Review the diff.
Point out bugs first, style last.
"""
