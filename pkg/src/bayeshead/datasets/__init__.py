"""Bundled datasets: the iris CSV, the 30-question toy QA corpus, and its
pre-extracted feature fixture."""
