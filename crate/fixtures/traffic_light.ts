state red
state green
state yellow
edge red green
edge green yellow
edge yellow red
label stop red yellow
label go green
