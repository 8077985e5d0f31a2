""" Exact K-theory invariants and lemma checks for triangle presentations of A2-tilde groups. """

__name__ = 'Triangle_KTheory'
__author__ = 'Ethan Hunt'
__email__ = 'chessking94@gmail.com'
__version__ = '1.0.0'

# globals
NL = '\n'
BOOLEANS = [True, False]
OUTPUT_FORMATS = ['text', 'json']
RANK_PRIMES = [2147483647, 2147483629]
CONFIG_DEFAULTS = {
    'logRoot': None,
    'logLevel': 'INFO',
    'rankPrimes': RANK_PRIMES,
    'searchProgressEvery': 10000
}
