# green and yellow merged into go
state red
state go
edge red go
edge go go
edge go red
label stop red
