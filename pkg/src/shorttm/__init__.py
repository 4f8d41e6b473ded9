from .corpus import Corpus, Vocabulary, load_corpus
