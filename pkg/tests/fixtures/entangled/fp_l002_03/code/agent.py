class ServiceConfig:
    deployment = "gpt-4o-prod"
    timeout = 30
