"""Core module - shared domain types, pixel geometry and normalized scoring."""
