"""
Test suite for Graph Blowup Lab.
"""
