"""Coherent configurations, quasi-thin schemes and their isomorphisms."""
