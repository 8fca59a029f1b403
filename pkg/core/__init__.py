"""Relaying model, channel draws, SNR recursion and outage estimators."""
