"""
Run configuration: document loading and schema validation.
"""
