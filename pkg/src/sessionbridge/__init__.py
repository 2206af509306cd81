"""Workbench for an imperative and a linear-functional session calculus."""
