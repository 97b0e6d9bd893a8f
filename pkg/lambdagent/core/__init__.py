# Core module 