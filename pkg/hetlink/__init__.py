"""hetlink – Trapped-ion to solid-state memory link simulator."""

__version__ = "0.1.0"
