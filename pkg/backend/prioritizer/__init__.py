"""Test-scenario prioritization for UML activity diagrams and state charts."""
