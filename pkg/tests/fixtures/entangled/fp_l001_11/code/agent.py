BACKSTORY = "A veteran analyst who double-checks every figure."
