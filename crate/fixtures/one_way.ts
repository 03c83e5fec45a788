# needs totalizing: a has no predecessor and c no successor
state a
state b
state c
edge a b
edge b c
