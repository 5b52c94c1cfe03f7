"""
Binary file readers and writers for features and encoder checkpoints
"""
from .binary_io import BinaryReader
from .feature_file import FeatureFile, FEATURE_MAGIC, FEATURE_VERSION, load_feature_file, save_feature_file

__all__ = ["BinaryReader", "FeatureFile", "FEATURE_MAGIC", "FEATURE_VERSION",
           "load_feature_file", "save_feature_file"]
