"""schemas package – pydantic models for scenario config sections and reports."""
