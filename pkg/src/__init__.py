"""
Simignore toolkit: similarity-based image-token selection for vision-language models.
"""
__version__ = "1.0.0"
__description__ = "Image-token selection by image-text similarity"
