"""
WordSpot - Annotation-free word spotting
Python package initialization
"""
