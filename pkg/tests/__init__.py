"""
Test suite for the semi-infinite period engine
"""
