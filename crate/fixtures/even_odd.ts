# parity of a counter that keeps incrementing
state even
state odd
edge even odd
edge odd even
label p even
