"""Tests for mmWave ICM."""
