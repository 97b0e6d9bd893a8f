class TriageSettings:
    prompt = "Classify the ticket as bug, billing or question."
    retries = 2
