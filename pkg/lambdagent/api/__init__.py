# API module 