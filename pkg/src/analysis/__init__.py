"""
Analysis package - attention influence and embedding cluster studies
"""
