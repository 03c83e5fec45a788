# p holds in 1, q in 2; once in 2 the system stays there
state 1
state 2
edge 1 1
edge 1 2
edge 2 2
label p 1
label q 2
