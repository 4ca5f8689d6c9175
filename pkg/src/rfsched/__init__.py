"""Discrete-time simulator and delay rate-function toolkit for multi-queue
multi-server downlink scheduling over time-correlated ON/OFF channels."""

__version__ = "0.1.0"
