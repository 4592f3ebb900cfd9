"""mmWave ICM - single-reflection cluster ray tracer."""
