# Lambdagent: a typed calculus for LLM agent composition
__version__ = "0.4.0"
