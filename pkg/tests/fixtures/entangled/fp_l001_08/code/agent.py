from agents import Agent

agent = Agent(name="helper", instructions="Answer politely and briefly.")
