"""Region-offset memory and C snippets from model code.

Every variable or opaque pointer base is its own region; addresses are
(region, offset) pairs. Untouched cells read back as fresh symbols. Model
handlers can run small pieces of C against session state, which is how the
bundled driver models fill in a resource structure.
"""

from ssi import Corpus, Interp, Location, Session
from ssi.memory import OPAQUE
from ssi.values import SymbolRoot, to_int

session = Session(Corpus.from_sources({"demo.c": "int unused;"}))
interp = Interp(session)
HERE = ("demo.c", 1)

iomem = session.store.alloc_region("iomem", OPAQUE)
ptr = session.values.addr_of(iomem.id, HERE)

# Reading a cell nobody wrote mints a symbol -- and keeps minting the same one.
first = session.store.load(Location(iomem.id, 0), 4, HERE)
again = session.store.load(Location(iomem.id, 0), 4, HERE)
assert isinstance(first.payload, SymbolRoot) and first is again
print("untouched cell reads back as", first.payload.label)

# A model can run C against the session; {0} is the first bound value.
interp.exec_snippet("*{0} = 0x7e200000;", [ptr])
print("after the snippet, the cell holds",
      hex(to_int(session.values.resolve(
          session.store.load(Location(iomem.id, 0), 4, HERE)))))

# Struct fields get offsets from a parsed definition when one is in the
# corpus, or sequentially on first use when it is not.
info_a = session.store.field_offset("mystery", "first_touch")
info_b = session.store.field_offset("mystery", "second_touch")
print(f"synthetic layout: first_touch at {info_a.offset}, "
      f"second_touch at {info_b.offset}")
