"""Compile logical and structural constraints into 0-1 integer linear programs."""
