"""Online-learning agents in the iterated Prisoner's Dilemma."""

__version__ = "0.1.0"
