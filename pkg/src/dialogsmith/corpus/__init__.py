from .model import Document, Turn, Dialogue
from .tokenizer import ByteBpeTokenizer

__all__ = ["Document", "Turn", "Dialogue", "ByteBpeTokenizer"]
